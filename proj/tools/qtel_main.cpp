// Command-line front end. Three subcommands:
//
//   run     execute a JSON experiment config and emit a JSON report
//   demo    run a canned configuration (standard, nonmaximal, rotation)
//   verify  randomized property sweep over seeded protocols
//
// The JSON report goes to stdout (or --out); a human-readable summary table
// goes to stderr. Exit codes: 0 clean, 1 verification or run failure,
// 2 configuration error.

#include "qtel/qtel.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <limits>
#include <random>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace {

constexpr double kPi = 3.14159265358979323846;

std::string fmt(double x, const char* spec = "%.4g") {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, x);
  return buf;
}

std::string fmt_or_dash(const qtel::Json& j, const char* spec = "%.4g") {
  if (j.is_null()) return "-";
  return fmt(j.get<double>(), spec);
}

void print_summary(const qtel::Json& doc, std::ostream& os) {
  const qtel::Json& res = doc["resource"];
  os << "resource type         " << res["type"].get<std::string>() << "\n";
  if (res.contains("schmidt_values")) {
    os << "schmidt values       ";
    for (const auto& s : res["schmidt_values"]) os << " " << fmt(s.get<double>(), "%.6g");
    os << "\n";
    os << "entropy (bits)        " << fmt(res["entropy_bits"].get<double>(), "%.12g") << "\n";
    os << "maximally entangled   "
       << (res["maximally_entangled"].get<bool>() ? "yes" : "no") << "\n";
  }
  os << "\n";
  os << std::left << std::setw(6) << "run" << std::setw(9) << "outcome" << std::setw(13)
     << "probability" << std::setw(14) << "recovery_err" << std::setw(14) << "luder_defect"
     << "status" << "\n";
  int rows = 0;
  int elided = 0;
  for (const auto& run : doc["runs"]) {
    for (const auto& oc : run["outcomes"]) {
      if (rows >= 16) {
        ++elided;
        continue;
      }
      ++rows;
      std::string status = "ok";
      if (oc["failed"].get<bool>())
        status = "FAILED: " + oc["failure_reason"].get<std::string>();
      os << std::left << std::setw(6) << run["input_index"].get<int>() << std::setw(9)
         << oc["outcome"].get<int>() << std::setw(13)
         << fmt(oc["probability"].get<double>(), "%.6f") << std::setw(14)
         << fmt_or_dash(oc["recovery_error"]) << std::setw(14)
         << fmt_or_dash(oc["channel_vs_luder_defect"]) << status << "\n";
    }
  }
  if (elided > 0) os << "(" << elided << " more rows in the JSON report)\n";
  const qtel::Json& agg = doc["aggregate"];
  os << "\n";
  os << "max recovery error    " << fmt_or_dash(agg["max_recovery_error"]) << "\n";
  os << "max key defect        " << fmt_or_dash(agg["max_key_unitarity_defect"]) << "\n";
  os << "max prob-sum defect   " << fmt_or_dash(agg["max_probability_sum_defect"]) << "\n";
  os << "failed outcomes       " << agg["failed_outcome_count"].get<int>() << "\n";
  if (agg.contains("measurement_oracle_defect"))
    os << "measurement defect    " << fmt_or_dash(agg["measurement_oracle_defect"]) << "\n";
  os << "verdict               " << (agg["hard_failure"].get<bool>() ? "FAIL" : "ok") << "\n";
}

int emit_report(const qtel::RunReport& report, const std::string& out_path) {
  const std::string text = report.doc.dump(2) + "\n";
  if (out_path.empty()) {
    std::cout << text;
  } else {
    std::ofstream out(out_path);
    if (!out) {
      std::cerr << "error: cannot write report to '" << out_path << "'\n";
      return 2;
    }
    out << text;
  }
  print_summary(report.doc, std::cerr);
  return report.hard_failure ? 1 : 0;
}

int run_from_text(const std::string& text, bool oracle, const std::string& out_path) {
  qtel::ExperimentConfig cfg;
  try {
    cfg = qtel::parse_config(text);
  } catch (const qtel::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  }
  try {
    return emit_report(qtel::run_experiment(cfg, oracle), out_path);
  } catch (const qtel::Error& e) {
    std::cerr << "run failed: " << e.what() << "\n";
    return 1;
  }
}

int cmd_run(const std::string& config_path, bool oracle, const std::string& out_path) {
  std::ifstream in(config_path);
  if (!in) {
    std::cerr << "error: cannot open config file '" << config_path << "'\n";
    return 2;
  }
  std::stringstream buf;
  buf << in.rdbuf();
  return run_from_text(buf.str(), oracle, out_path);
}

int cmd_demo(const std::string& preset, double t1, double t2, double t3, int samples,
             std::uint64_t seed, const std::string& out_path) {
  qtel::Json cfg;
  cfg["dim"] = 2;
  cfg["seed"] = seed;
  if (preset == "standard") {
    // diag(cos, sin) at pi/4 is I/sqrt(2): the maximally entangled scheme.
    cfg["alice_basis"] = "spin";
    cfg["resource"] = {{"pure_theta", kPi / 4.0}};
  } else if (preset == "nonmaximal") {
    cfg["alice_basis"] = "spin";
    cfg["resource"] = {{"pure_theta", t1}};
  } else if (preset == "rotation") {
    cfg["alice_basis"] = {
        {"preset", "rotation"}, {"theta1", t1}, {"theta2", t2}, {"theta3", t3}};
    cfg["resource"] = {{"pure_theta", kPi / 3.0}};
  } else {
    std::cerr << "error: unknown preset '" << preset
              << "' (expected standard, nonmaximal, or rotation)\n";
    return 2;
  }
  cfg["inputs"] = {{"random_count", samples}};
  return run_from_text(cfg.dump(), false, out_path);
}

// Random Hilbert-Schmidt orthonormal basis of M_n: QR of a Gaussian matrix on
// the n^2-dimensional coefficient space, columns unvectorized row-major.
qtel::OperatorBasis random_basis(qtel::Index n, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss;
  const qtel::Index d = n * n;
  qtel::Matrix coeffs(d, d);
  for (qtel::Index i = 0; i < d; ++i)
    for (qtel::Index j = 0; j < d; ++j) coeffs(i, j) = qtel::Complex(gauss(rng), gauss(rng));
  const qtel::Matrix q = Eigen::HouseholderQR<qtel::Matrix>(coeffs).householderQ();
  qtel::OperatorBasis basis;
  basis.dim = n;
  for (qtel::Index k = 0; k < d; ++k) {
    qtel::Matrix m(n, n);
    for (qtel::Index i = 0; i < n; ++i)
      for (qtel::Index j = 0; j < n; ++j) m(i, j) = q(i * n + j, k);
    basis.elements.push_back(std::move(m));
  }
  return basis;
}

qtel::Matrix haar_like_unitary(qtel::Index n, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss;
  qtel::Matrix g(n, n);
  for (qtel::Index i = 0; i < n; ++i)
    for (qtel::Index j = 0; j < n; ++j) g(i, j) = qtel::Complex(gauss(rng), gauss(rng));
  return Eigen::HouseholderQR<qtel::Matrix>(g).householderQ();
}

// Unit-norm resource operator with singular values bounded away from zero,
// so kappa^{-1/2} stays well conditioned and recovery checks are meaningful.
qtel::Matrix conditioned_resource(qtel::Index n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> band(0.5, 1.5);
  Eigen::VectorXd s(n);
  for (qtel::Index i = 0; i < n; ++i) s(i) = band(rng);
  s /= s.norm();
  return haar_like_unitary(n, rng) * s.asDiagonal().toDenseMatrix().cast<qtel::Complex>() *
         haar_like_unitary(n, rng);
}

// Shift-clock family X^a Z^b / sqrt(n), rotated by unitaries on both sides.
// Every element has all singular values equal to 1/sqrt(n), so protocols
// built on it are perfectly conditioned at any dimension.
qtel::OperatorBasis conditioned_basis(qtel::Index n, std::mt19937_64& rng) {
  qtel::Matrix x = qtel::Matrix::Zero(n, n);
  qtel::Matrix z = qtel::Matrix::Zero(n, n);
  for (qtel::Index i = 0; i < n; ++i) {
    x((i + 1) % n, i) = 1.0;
    z(i, i) = std::polar(1.0, 2.0 * kPi * static_cast<double>(i) / static_cast<double>(n));
  }
  const qtel::Matrix v = haar_like_unitary(n, rng);
  const qtel::Matrix w = haar_like_unitary(n, rng);
  qtel::OperatorBasis basis;
  basis.dim = n;
  qtel::Matrix xa = qtel::Matrix::Identity(n, n);
  for (qtel::Index a = 0; a < n; ++a) {
    qtel::Matrix zb = qtel::Matrix::Identity(n, n);
    for (qtel::Index b = 0; b < n; ++b) {
      basis.elements.push_back(v * (xa * zb / std::sqrt(static_cast<double>(n))) * w);
      zb = z * zb;
    }
    xa = x * xa;
  }
  return basis;
}

qtel::RealVector random_weights(qtel::Index m, std::mt19937_64& rng) {
  std::exponential_distribution<double> draw(1.0);
  qtel::RealVector w(m);
  for (qtel::Index i = 0; i < m; ++i) w(i) = draw(rng);
  w /= w.sum();
  return w;
}

double max_abs(const qtel::Matrix& m) { return m.cwiseAbs().maxCoeff(); }

struct Property {
  const char* name;
  double bound;
  double worst = 0.0;
  bool ran = false;

  void record(double defect) {
    ran = true;
    if (defect > worst) worst = defect;
  }
};

int cmd_verify(qtel::Index n, int trials, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  Property projectors{"projector family axioms", 1e-10};
  Property kappa_sum{"kappa resolves the identity", 1e-10};
  Property prob_sum{"outcome probabilities sum to 1", 1e-10};
  Property recovery{"complete teleportation recovery", 1e-8};
  Property key_unit{"key unitarity", 1e-9};
  Property choi{"choi spectrum equals sorted weights", 1e-10};
  Property direct{"closed form matches measurement form", 1e-10};

  const qtel::Index d = n * n;
  for (int t = 0; t < trials; ++t) {
    const bool pure_trial = (t % 2 == 0);
    qtel::OperatorBasis alice = random_basis(n, rng);

    // Projector family axioms on the unrestricted random basis.
    const qtel::ProjectorFamily fam =
        qtel::projector_family(alice, pure_trial ? qtel::Side::left : qtel::Side::right);
    qtel::Matrix sum = qtel::Matrix::Zero(d, d);
    for (qtel::Index a = 0; a < d; ++a) {
      const qtel::Matrix& pa = fam.projectors[static_cast<std::size_t>(a)];
      sum += pa;
      projectors.record(max_abs(pa * pa - pa));
      for (qtel::Index b = a + 1; b < d; ++b)
        projectors.record(max_abs(pa * fam.projectors[static_cast<std::size_t>(b)]));
    }
    projectors.record(max_abs(sum - qtel::Matrix::Identity(d, d)));

    qtel::ResourceSpec resource;
    if (pure_trial) {
      resource = qtel::PureResource{conditioned_resource(n, rng)};
    } else {
      qtel::CpMapSpec spec;
      spec.weights = random_weights(d, rng);
      spec.basis = random_basis(n, rng);
      resource = spec;

      // Choi-state spectrum against the sorted weight vector.
      const qtel::BipartiteState sigma = qtel::sigma_from_cp(spec);
      Eigen::SelfAdjointEigenSolver<qtel::Matrix> eig(sigma.matrix);
      qtel::RealVector sorted = spec.weights;
      std::sort(sorted.data(), sorted.data() + sorted.size());
      choi.record((eig.eigenvalues() - sorted).cwiseAbs().maxCoeff());
    }

    const qtel::Protocol protocol = qtel::make_protocol(n, alice, resource);
    const qtel::InputState rho = qtel::random_input_state(n, rng());

    qtel::Matrix ksum = qtel::Matrix::Zero(n, n);
    double total = 0.0;
    for (qtel::Index a = 0; a < d; ++a) {
      ksum += qtel::kappa(protocol, a);
      total += qtel::outcome_probability(protocol, a, rho);
      if (n <= 4)
        direct.record(max_abs(qtel::teleport_raw(protocol, a, rho) -
                              qtel::teleport_raw_direct(protocol, a, rho)));
    }
    kappa_sum.record(max_abs(ksum - qtel::Matrix::Identity(n, n)));
    prob_sum.record(std::abs(total - 1.0));

    // Recovery is exact for any invertible resource; check it on a
    // conditioned protocol so floating-point amplification stays bounded.
    if (pure_trial) {
      const qtel::Protocol well =
          qtel::make_protocol(n, conditioned_basis(n, rng), resource);
      for (const qtel::OutcomeResult& oc : qtel::run_protocol(well, rho)) {
        if (oc.failed) {
          recovery.record(std::numeric_limits<double>::infinity());
          continue;
        }
        recovery.record(oc.recovery_error);
        if (oc.key)
          key_unit.record(max_abs(oc.key->adjoint() * *oc.key -
                                  qtel::Matrix::Identity(n, n)));
      }
    }
  }

  std::cout << "property sweep: n=" << n << ", trials=" << trials << ", seed=" << seed
            << "\n";
  const Property* props[] = {&projectors, &kappa_sum, &prob_sum, &recovery,
                             &key_unit,   &choi,      &direct};
  int failures = 0;
  for (const Property* p : props) {
    std::cout << "  " << std::left << std::setw(38) << p->name;
    if (!p->ran) {
      std::cout << "not run\n";
      continue;
    }
    const bool ok = p->worst <= p->bound;
    if (!ok) ++failures;
    std::cout << "max defect " << std::setw(11) << fmt(p->worst) << "bound " << std::setw(9)
              << fmt(p->bound) << (ok ? "ok" : "FAIL") << "\n";
  }
  if (failures == 0) {
    std::cout << "verify: all properties within bounds\n";
    return 0;
  }
  std::cout << "verify: " << failures << " propert" << (failures == 1 ? "y" : "ies")
            << " out of bounds\n";
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"simulator for teleportation schemes built from operator bases"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "execute a JSON experiment config");
  std::string config_path;
  std::string run_out;
  bool oracle = false;
  run->add_option("--config", config_path, "path to the JSON config file")->required();
  run->add_flag("--oracle", oracle,
                "also run the measurement-form computation and report the disagreement "
                "(dim <= 4)");
  run->add_option("--out", run_out, "write the JSON report to this file instead of stdout");

  auto* demo = app.add_subcommand("demo", "run a canned configuration");
  std::string preset;
  std::string demo_out;
  double theta1 = kPi / 3.0;
  double theta2 = 0.7;
  double theta3 = 1.1;
  int samples = 5;
  std::uint64_t demo_seed = 0;
  demo->add_option("--preset", preset, "standard | nonmaximal | rotation")->required();
  demo->add_option("--theta1", theta1,
                   "resource angle (nonmaximal) or first rotation angle (rotation)");
  demo->add_option("--theta2", theta2, "second rotation angle (rotation preset)");
  demo->add_option("--theta3", theta3, "third rotation angle (rotation preset)");
  demo->add_option("--samples", samples, "number of random input states")
      ->check(CLI::PositiveNumber);
  demo->add_option("--seed", demo_seed, "seed for the input-state stream");
  demo->add_option("--out", demo_out, "write the JSON report to this file instead of stdout");

  auto* verify = app.add_subcommand("verify", "randomized property sweep");
  int dim = 2;
  int trials = 25;
  std::uint64_t verify_seed = 1;
  verify->add_option("--n", dim, "matrix dimension")->check(CLI::Range(2, 8));
  verify->add_option("--trials", trials, "number of random protocols")
      ->check(CLI::PositiveNumber);
  verify->add_option("--seed", verify_seed, "sweep seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  if (run->parsed()) return cmd_run(config_path, oracle, run_out);
  if (demo->parsed()) return cmd_demo(preset, theta1, theta2, theta3, samples, demo_seed, demo_out);
  return cmd_verify(dim, trials, verify_seed);
}
