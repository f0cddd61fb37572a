#pragma once

// Experiment configuration, execution, and machine-readable reporting: the
// in-process engine behind the command-line front end.

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <json.hpp>

#include "qtel/qubit_bases.hpp"
#include "qtel/teleport.hpp"

namespace qtel {

using Json = nlohmann::ordered_json;

struct Tolerances {
  double structural = kStructuralTol;
  double recovery = kKeyTol;
};

// QTEL_TOLERANCE overrides both defaults; explicit config values still win.
inline Tolerances default_tolerances() {
  Tolerances t;
  if (const char* env = std::getenv("QTEL_TOLERANCE")) {
    char* end = nullptr;
    const double v = std::strtod(env, &end);
    if (end == env || *end != '\0' || !(v > 0.0) || !std::isfinite(v))
      throw ConfigError("QTEL_TOLERANCE must be a positive number, got '" + std::string(env) +
                        "'");
    t.structural = v;
    t.recovery = v;
  }
  return t;
}

struct BasisSpec {
  std::string preset;  // empty means explicit matrices
  RotationAngles angles;
  std::vector<Matrix> matrices;
};

struct ResourceConfig {
  bool pure = true;
  std::optional<double> pure_theta;
  Matrix pure_matrix;
  RealVector weights;
  BasisSpec basis;
};

struct ExperimentConfig {
  Index dim = 2;
  std::uint64_t seed = 0;
  BasisSpec alice;
  ResourceConfig resource;
  std::vector<Matrix> input_matrices;  // empty means seeded-random inputs
  Index random_count = 10;
  Tolerances tolerances;
};

// Twelve significant digits: stable text round-trip across platforms.
inline double round_sig(double x) {
  if (!std::isfinite(x)) return x;
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return std::strtod(buf, nullptr);
}

inline Json number_or_null(double x) {
  if (std::isnan(x)) return nullptr;
  return round_sig(x);
}

// Complex entries as [re, im]; matrices as row-major nested arrays.
inline Json matrix_to_json(const Matrix& m) {
  Json rows = Json::array();
  for (Index r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (Index c = 0; c < m.cols(); ++c)
      row.push_back(Json::array({round_sig(std::real(m(r, c))), round_sig(std::imag(m(r, c)))}));
    rows.push_back(std::move(row));
  }
  return rows;
}

namespace detail {

inline Complex parse_entry(const Json& j) {
  if (j.is_number()) return Complex(j.get<double>(), 0.0);
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
    return Complex(j[0].get<double>(), j[1].get<double>());
  throw ConfigError("matrix entry must be a number or a [re, im] pair");
}

inline Matrix parse_matrix(const Json& j) {
  if (!j.is_array() || j.empty() || !j[0].is_array())
    throw ConfigError("matrix must be a non-empty array of rows");
  const Index rows = static_cast<Index>(j.size());
  const Index cols = static_cast<Index>(j[0].size());
  if (cols == 0) throw ConfigError("matrix rows must be non-empty");
  Matrix m(rows, cols);
  for (Index r = 0; r < rows; ++r) {
    const Json& row = j[static_cast<size_t>(r)];
    if (!row.is_array() || static_cast<Index>(row.size()) != cols)
      throw ConfigError("matrix rows must have equal length");
    for (Index c = 0; c < cols; ++c) m(r, c) = parse_entry(row[static_cast<size_t>(c)]);
  }
  return m;
}

inline double parse_angle(const Json& j, const char* name) {
  if (!j.is_number()) throw ConfigError(std::string(name) + " must be a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) throw ConfigError(std::string(name) + " must be finite");
  return v;
}

inline bool known_preset(const std::string& name) {
  return name == "spin" || name == "matrix_units" || name == "simple_theta" ||
         name == "rotation";
}

inline BasisSpec parse_basis_spec(const Json& j, const char* who) {
  BasisSpec b;
  if (j.is_string()) {
    b.preset = j.get<std::string>();
    if (!known_preset(b.preset))
      throw ConfigError(std::string(who) + ": unknown basis preset '" + b.preset + "'");
    return b;
  }
  if (!j.is_object())
    throw ConfigError(std::string(who) + ": basis spec must be a preset name or an object");
  if (j.contains("preset")) {
    b.preset = j["preset"].get<std::string>();
    if (!known_preset(b.preset))
      throw ConfigError(std::string(who) + ": unknown basis preset '" + b.preset + "'");
    if (j.contains("theta1")) b.angles.theta1 = parse_angle(j["theta1"], "theta1");
    if (j.contains("theta2")) b.angles.theta2 = parse_angle(j["theta2"], "theta2");
    if (j.contains("theta3")) b.angles.theta3 = parse_angle(j["theta3"], "theta3");
    return b;
  }
  if (j.contains("matrices")) {
    if (!j["matrices"].is_array() || j["matrices"].empty())
      throw ConfigError(std::string(who) + ": 'matrices' must be a non-empty array");
    for (const Json& m : j["matrices"]) b.matrices.push_back(parse_matrix(m));
    return b;
  }
  throw ConfigError(std::string(who) + ": basis spec needs 'preset' or 'matrices'");
}

inline Json basis_spec_to_json(const BasisSpec& b) {
  if (!b.preset.empty()) {
    if (b.preset == "simple_theta")
      return Json{{"preset", b.preset},
                  {"theta1", round_sig(b.angles.theta1)},
                  {"theta2", round_sig(b.angles.theta2)}};
    if (b.preset == "rotation")
      return Json{{"preset", b.preset},
                  {"theta1", round_sig(b.angles.theta1)},
                  {"theta2", round_sig(b.angles.theta2)},
                  {"theta3", round_sig(b.angles.theta3)}};
    return Json(b.preset);
  }
  Json ms = Json::array();
  for (const Matrix& m : b.matrices) ms.push_back(matrix_to_json(m));
  return Json{{"matrices", std::move(ms)}};
}

inline double min_singular_value(const Matrix& m) {
  return Eigen::JacobiSVD<Matrix>(m).singularValues().minCoeff();
}

}  // namespace detail

inline OperatorBasis make_basis(const BasisSpec& spec, Index dim) {
  if (!spec.preset.empty()) {
    if (spec.preset == "matrix_units") return matrix_units(dim);
    if (dim != 2)
      throw ConfigError("basis preset '" + spec.preset + "' requires dim 2");
    if (spec.preset == "spin") return spin_basis();
    if (spec.preset == "simple_theta")
      return simple_theta_basis(spec.angles.theta1, spec.angles.theta2);
    if (spec.preset == "rotation")
      return basis_from_orthogonal(rotation_C(spec.angles), spin_basis());
    throw ConfigError("unknown basis preset '" + spec.preset + "'");
  }
  if (static_cast<Index>(spec.matrices.size()) != dim * dim)
    throw ConfigError("explicit basis needs dim^2 matrices, got " +
                      std::to_string(spec.matrices.size()));
  OperatorBasis b;
  b.dim = dim;
  for (const Matrix& m : spec.matrices) {
    if (m.rows() != dim || m.cols() != dim)
      throw ConfigError("explicit basis matrices must be dim x dim");
    b.elements.push_back(m);
  }
  return b;
}

inline Protocol protocol_from_config(const ExperimentConfig& cfg) {
  const OperatorBasis alice = make_basis(cfg.alice, cfg.dim);
  ResourceSpec resource;
  if (cfg.resource.pure) {
    Matrix f;
    if (cfg.resource.pure_theta) {
      if (cfg.dim != 2) throw ConfigError("'pure_theta' resources require dim 2");
      f = Matrix::Zero(2, 2);
      f(0, 0) = std::cos(*cfg.resource.pure_theta);
      f(1, 1) = std::sin(*cfg.resource.pure_theta);
    } else {
      f = cfg.resource.pure_matrix;
    }
    resource = PureResource{std::move(f)};
  } else {
    CpMapSpec t;
    t.weights = cfg.resource.weights;
    t.basis = make_basis(cfg.resource.basis, cfg.dim);
    resource = std::move(t);
  }
  try {
    return make_protocol(cfg.dim, alice, std::move(resource));
  } catch (const Error& e) {
    throw ConfigError(std::string("config does not resolve to a valid protocol: ") + e.what());
  }
}

inline std::vector<InputState> inputs_from_config(const ExperimentConfig& cfg) {
  std::vector<InputState> out;
  if (!cfg.input_matrices.empty()) {
    for (size_t k = 0; k < cfg.input_matrices.size(); ++k) {
      if (cfg.input_matrices[k].rows() != cfg.dim)
        throw ConfigError("input state " + std::to_string(k) + " has the wrong dimension");
      try {
        out.push_back(make_input_state(cfg.input_matrices[k]));
      } catch (const Error& e) {
        throw ConfigError("input state " + std::to_string(k) + " invalid: " + e.what());
      }
    }
    return out;
  }
  for (Index k = 0; k < cfg.random_count; ++k)
    out.push_back(random_input_state(cfg.dim, cfg.seed + static_cast<std::uint64_t>(k)));
  return out;
}

inline ExperimentConfig parse_config(const std::string& text) {
  Json doc;
  try {
    doc = Json::parse(text);
  } catch (const std::exception& e) {
    throw ConfigError(std::string("invalid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ConfigError("config must be a JSON object");

  ExperimentConfig cfg;
  cfg.tolerances = default_tolerances();
  try {
    for (const auto& [key, value] : doc.items()) {
      if (key != "dim" && key != "seed" && key != "alice_basis" && key != "resource" &&
          key != "inputs" && key != "tolerances")
        throw ConfigError("unknown config key '" + key + "'");
    }
    if (doc.contains("dim")) {
      if (!doc["dim"].is_number_integer() || doc["dim"].get<long long>() < 1)
        throw ConfigError("'dim' must be a positive integer");
      cfg.dim = doc["dim"].get<Index>();
      if (cfg.dim > 8) throw ConfigError("'dim' larger than 8 is not supported");
    }
    if (doc.contains("seed")) {
      if (!doc["seed"].is_number_integer() || doc["seed"].get<long long>() < 0)
        throw ConfigError("'seed' must be a non-negative integer");
      cfg.seed = doc["seed"].get<std::uint64_t>();
    }
    if (!doc.contains("alice_basis")) throw ConfigError("config needs 'alice_basis'");
    cfg.alice = detail::parse_basis_spec(doc["alice_basis"], "alice_basis");

    if (!doc.contains("resource") || !doc["resource"].is_object())
      throw ConfigError("config needs a 'resource' object");
    const Json& res = doc["resource"];
    if (res.contains("pure_theta")) {
      cfg.resource.pure = true;
      cfg.resource.pure_theta = detail::parse_angle(res["pure_theta"], "pure_theta");
    } else if (res.contains("pure")) {
      cfg.resource.pure = true;
      cfg.resource.pure_matrix = detail::parse_matrix(res["pure"]);
    } else if (res.contains("mixed")) {
      cfg.resource.pure = false;
      const Json& mixed = res["mixed"];
      if (!mixed.is_object() || !mixed.contains("weights") || !mixed.contains("basis"))
        throw ConfigError("'mixed' resource needs 'weights' and 'basis'");
      const Json& w = mixed["weights"];
      if (!w.is_array() || w.empty()) throw ConfigError("'weights' must be a non-empty array");
      cfg.resource.weights = RealVector(static_cast<Index>(w.size()));
      double sum = 0.0;
      for (size_t k = 0; k < w.size(); ++k) {
        if (!w[k].is_number()) throw ConfigError("'weights' entries must be numbers");
        const double v = w[k].get<double>();
        if (v < 0.0) throw ConfigError("'weights' entries must be non-negative");
        cfg.resource.weights(static_cast<Index>(k)) = v;
        sum += v;
      }
      if (std::abs(sum - 1.0) > 1e-9)
        throw ConfigError("'weights' sum to " + std::to_string(sum) + ", expected 1");
      cfg.resource.basis = detail::parse_basis_spec(mixed["basis"], "resource basis");
    } else {
      throw ConfigError("resource needs 'pure_theta', 'pure', or 'mixed'");
    }

    if (doc.contains("inputs")) {
      const Json& in = doc["inputs"];
      if (!in.is_object()) throw ConfigError("'inputs' must be an object");
      if (in.contains("matrices")) {
        if (!in["matrices"].is_array() || in["matrices"].empty())
          throw ConfigError("'inputs.matrices' must be a non-empty array");
        for (const Json& m : in["matrices"])
          cfg.input_matrices.push_back(detail::parse_matrix(m));
      } else if (in.contains("random_count")) {
        if (!in["random_count"].is_number_integer() || in["random_count"].get<long long>() < 1)
          throw ConfigError("'inputs.random_count' must be a positive integer");
        cfg.random_count = in["random_count"].get<Index>();
      } else {
        throw ConfigError("'inputs' needs 'matrices' or 'random_count'");
      }
    }

    if (doc.contains("tolerances")) {
      const Json& tol = doc["tolerances"];
      if (!tol.is_object()) throw ConfigError("'tolerances' must be an object");
      if (tol.contains("structural")) {
        const double v = tol["structural"].get<double>();
        if (!(v > 0.0) || !std::isfinite(v))
          throw ConfigError("'tolerances.structural' must be positive");
        cfg.tolerances.structural = v;
      }
      if (tol.contains("recovery")) {
        const double v = tol["recovery"].get<double>();
        if (!(v > 0.0) || !std::isfinite(v))
          throw ConfigError("'tolerances.recovery' must be positive");
        cfg.tolerances.recovery = v;
      }
    }
  } catch (const Json::exception& e) {
    throw ConfigError(std::string("malformed config: ") + e.what());
  }

  // Resolvability check: building the protocol and inputs surfaces size and
  // normalization problems at parse time.
  protocol_from_config(cfg);
  inputs_from_config(cfg);
  return cfg;
}

inline Json config_echo(const ExperimentConfig& cfg) {
  Json doc;
  doc["dim"] = cfg.dim;
  doc["seed"] = cfg.seed;
  doc["alice_basis"] = detail::basis_spec_to_json(cfg.alice);
  if (cfg.resource.pure) {
    if (cfg.resource.pure_theta)
      doc["resource"] = Json{{"pure_theta", round_sig(*cfg.resource.pure_theta)}};
    else
      doc["resource"] = Json{{"pure", matrix_to_json(cfg.resource.pure_matrix)}};
  } else {
    Json w = Json::array();
    for (Index k = 0; k < cfg.resource.weights.size(); ++k)
      w.push_back(round_sig(cfg.resource.weights(k)));
    doc["resource"] =
        Json{{"mixed", Json{{"weights", std::move(w)},
                            {"basis", detail::basis_spec_to_json(cfg.resource.basis)}}}};
  }
  if (!cfg.input_matrices.empty()) {
    Json ms = Json::array();
    for (const Matrix& m : cfg.input_matrices) ms.push_back(matrix_to_json(m));
    doc["inputs"] = Json{{"matrices", std::move(ms)}};
  } else {
    doc["inputs"] = Json{{"random_count", cfg.random_count}};
  }
  doc["tolerances"] = Json{{"structural", round_sig(cfg.tolerances.structural)},
                           {"recovery", round_sig(cfg.tolerances.recovery)}};
  return doc;
}

struct RunReport {
  Json doc;
  bool hard_failure = false;
};

// Deterministic enumeration over all outcomes for every input state. With
// oracle_mode the tripartite measurement computation is run alongside the
// closed form and their maximum disagreement is reported (dim <= 4 only).
inline RunReport run_experiment(const ExperimentConfig& cfg, bool oracle_mode = false) {
  const Protocol p = protocol_from_config(cfg);
  const std::vector<InputState> inputs = inputs_from_config(cfg);
  const bool pure = std::holds_alternative<PureResource>(p.resource);
  const bool run_oracle = oracle_mode && cfg.dim <= 4;

  Json doc;
  doc["config"] = config_echo(cfg);

  Json res;
  res["type"] = pure ? "pure" : "mixed";
  if (pure) {
    const Matrix& f = std::get<PureResource>(p.resource).f;
    const RealVector s = schmidt_values(f);
    Json sv = Json::array();
    for (Index k = 0; k < s.size(); ++k) sv.push_back(round_sig(s(k)));
    res["schmidt_values"] = std::move(sv);
    res["entropy_bits"] = round_sig(entanglement_entropy(f));
    res["maximally_entangled"] = is_maximally_entangled(f, cfg.tolerances.structural);
    res["min_singular_value_f"] = round_sig(s(s.size() - 1));
  } else {
    Json w = Json::array();
    for (Index k = 0; k < cfg.resource.weights.size(); ++k)
      w.push_back(round_sig(cfg.resource.weights(k)));
    res["weights"] = std::move(w);
  }
  Json alice_sv = Json::array();
  for (const Matrix& g : p.alice_basis.elements)
    alice_sv.push_back(round_sig(detail::min_singular_value(g)));
  res["alice_min_singular_values"] = std::move(alice_sv);
  doc["resource"] = std::move(res);

  double max_recovery = std::numeric_limits<double>::quiet_NaN();
  double max_key_defect = std::numeric_limits<double>::quiet_NaN();
  double max_prob_defect = 0.0;
  double oracle_defect = 0.0;
  size_t failed_count = 0;

  Json runs = Json::array();
  for (size_t i = 0; i < inputs.size(); ++i) {
    const InputState& rho = inputs[i];
    Json run;
    run["input_index"] = i;
    run["input"] = matrix_to_json(rho.matrix);
    Json outs = Json::array();
    double prob_sum = 0.0;
    for (const OutcomeResult& r : run_protocol(p, rho)) {
      Json o;
      o["outcome"] = r.outcome;
      o["probability"] = round_sig(r.probability);
      prob_sum += r.probability;

      double key_defect = std::numeric_limits<double>::quiet_NaN();
      if (r.key)
        key_defect = max_abs(
            Matrix(r.key->adjoint() * *r.key - Matrix::Identity(p.dim, p.dim)));
      o["key_unitarity_defect"] = number_or_null(key_defect);
      o["recovery_error"] = number_or_null(r.recovery_error);

      double luder_defect = std::numeric_limits<double>::quiet_NaN();
      if (!r.failed && r.probability > 1e-12) {
        try {
          luder_defect = max_abs(Matrix(post_measurement_state(p, r.outcome, rho) -
                                        channel_ups(p, r.outcome, rho)));
        } catch (const NotNormalizableError&) {
        }
      }
      o["channel_vs_luder_defect"] = number_or_null(luder_defect);
      o["failed"] = r.failed;
      o["failure_reason"] = r.failure_reason;
      outs.push_back(std::move(o));

      if (r.failed) ++failed_count;
      if (!std::isnan(r.recovery_error) &&
          (std::isnan(max_recovery) || r.recovery_error > max_recovery))
        max_recovery = r.recovery_error;
      if (!std::isnan(key_defect) && (std::isnan(max_key_defect) || key_defect > max_key_defect))
        max_key_defect = key_defect;
      if (run_oracle)
        oracle_defect = std::max(
            oracle_defect,
            max_abs(Matrix(teleport_raw_direct(p, r.outcome, rho) - r.raw_state)));
    }
    const double prob_defect = std::abs(prob_sum - 1.0);
    max_prob_defect = std::max(max_prob_defect, prob_defect);
    run["outcomes"] = std::move(outs);
    run["probability_sum_defect"] = round_sig(prob_defect);
    runs.push_back(std::move(run));
  }
  doc["runs"] = std::move(runs);

  const bool recovery_bad =
      pure && failed_count == 0 &&
      (std::isnan(max_recovery) || max_recovery > cfg.tolerances.recovery);
  const bool hard_failure = failed_count > 0 || max_prob_defect > cfg.tolerances.structural ||
                            recovery_bad ||
                            (run_oracle && oracle_defect > cfg.tolerances.structural);

  Json agg;
  agg["max_recovery_error"] = number_or_null(max_recovery);
  agg["max_key_unitarity_defect"] = number_or_null(max_key_defect);
  agg["max_probability_sum_defect"] = round_sig(max_prob_defect);
  agg["failed_outcome_count"] = failed_count;
  if (run_oracle) agg["measurement_oracle_defect"] = round_sig(oracle_defect);
  agg["hard_failure"] = hard_failure;
  doc["aggregate"] = std::move(agg);

  return RunReport{std::move(doc), hard_failure};
}

}  // namespace qtel
