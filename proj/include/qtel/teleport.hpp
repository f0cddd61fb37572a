#pragma once

// The teleportation engine: closed-form outcome maps, the tripartite
// measurement oracle, normalization operators kappa, trace-preserving
// channels, unitary recovery keys, and full protocol runs.

#include <cmath>
#include <limits>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "qtel/channels.hpp"
#include "qtel/linalg.hpp"
#include "qtel/operator_space.hpp"
#include "qtel/resource.hpp"
#include "qtel/types.hpp"

namespace qtel {

using ResourceSpec = std::variant<CpMapSpec, PureResource>;

inline Index resource_dim(const ResourceSpec& r) {
  if (const auto* t = std::get_if<CpMapSpec>(&r)) return t->basis.dim;
  return std::get<PureResource>(r).f.rows();
}

inline void validate(const ResourceSpec& r) {
  std::visit([](const auto& x) { validate(x); }, r);
}

// Alice's measurement basis {g_a} plus the shared resource.
struct Protocol {
  Index dim = 0;
  OperatorBasis alice_basis;
  ResourceSpec resource;
};

inline Protocol make_protocol(Index dim, OperatorBasis alice_basis, ResourceSpec resource) {
  if (dim < 1) throw DimensionError("make_protocol: dimension must be positive");
  if (alice_basis.dim != dim)
    throw DimensionError("make_protocol: alice basis dimension mismatch");
  if (!is_orthonormal_basis(alice_basis))
    throw MalformedBasisError("make_protocol: alice basis is not orthonormal");
  validate(resource);
  if (resource_dim(resource) != dim)
    throw DimensionError("make_protocol: resource dimension mismatch");
  return Protocol{dim, std::move(alice_basis), std::move(resource)};
}

// Density matrix: Hermitian, PSD, unit trace.
struct InputState {
  Index dim = 0;
  Matrix matrix;
};

inline InputState make_input_state(Matrix rho) {
  if (rho.rows() != rho.cols() || rho.rows() < 1)
    throw DimensionError("InputState: matrix must be square");
  if (!is_hermitian_within(rho, kStructuralTol))
    throw MalformedStateError("InputState: matrix is not Hermitian");
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (rho + Matrix(rho.adjoint())),
                                           Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < -kStructuralTol)
    throw MalformedStateError("InputState: negative eigenvalue " +
                              std::to_string(es.eigenvalues().minCoeff()));
  if (std::abs(std::real(rho.trace()) - 1.0) > kStructuralTol ||
      std::abs(std::imag(rho.trace())) > kStructuralTol)
    throw MalformedStateError("InputState: trace is not 1");
  return InputState{rho.rows(), std::move(rho)};
}

// rho = G G* / tr(G G*) over a seeded complex-Gaussian G: full rank almost
// surely, deterministic in the seed.
inline InputState random_input_state(Index n, std::uint64_t seed) {
  if (n < 1) throw DimensionError("random_input_state: dimension must be positive");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Matrix g(n, n);
  for (Index r = 0; r < n; ++r)
    for (Index c = 0; c < n; ++c) g(r, c) = Complex(gauss(rng), gauss(rng));
  Matrix rho = g * g.adjoint();
  rho /= rho.trace();
  return InputState{n, std::move(rho)};
}

// Theta(a): the resource map applied to a.
inline Matrix apply_resource(const ResourceSpec& r, const Matrix& a) {
  if (const auto* t = std::get_if<CpMapSpec>(&r)) return apply_cp(*t, a);
  const Matrix& f = std::get<PureResource>(r).f;
  return f * a * f.adjoint();
}

// Dual map: tr(Theta(a) b) = tr(a dual(b)).
inline Matrix dual_resource(const ResourceSpec& r, const Matrix& a) {
  if (const auto* t = std::get_if<CpMapSpec>(&r)) return dual_cp(*t, a);
  const Matrix& f = std::get<PureResource>(r).f;
  return f.adjoint() * a * f;
}

inline BipartiteState resource_sigma(const Protocol& p) {
  if (const auto* t = std::get_if<CpMapSpec>(&p.resource)) return sigma_from_cp(*t);
  return sigma_from_pure(std::get<PureResource>(p.resource));
}

namespace detail {

inline const Matrix& alice_element(const Protocol& p, Index alpha) {
  if (alpha < 0 || alpha >= static_cast<Index>(p.alice_basis.elements.size()))
    throw DimensionError("outcome index out of range");
  return p.alice_basis.elements[static_cast<size_t>(alpha)];
}

}  // namespace detail

// Closed form of the outcome-alpha map: Theta(g_a rho g_a*). For a pure
// resource this is (f g_a) rho (f g_a)*.
inline Matrix teleport_raw(const Protocol& p, Index alpha, const InputState& rho) {
  const Matrix& g = detail::alice_element(p, alpha);
  return apply_resource(p.resource, g * rho.matrix * g.adjoint());
}

// Tripartite oracle for the closed form: prepares rho (x) sigma on the
// n^3-dimensional space, applies Alice's projection on factors 1-2, and
// traces them out. The projection for outcome alpha is onto vec_left(g_a*):
// expanding the sandwich gives <phi,(rho (x) e_ij) phi> = (B* rho B)[i,j]
// for phi = vec_left(B), so B = g_a* reproduces Theta(g_a rho g_a*).
inline Matrix teleport_raw_direct(const Protocol& p, Index alpha, const InputState& rho) {
  const Index n = p.dim;
  if (n > 8) throw DimensionError("teleport_raw_direct: n^3 intermediate too large for n > 8");
  const Matrix& g = detail::alice_element(p, alpha);
  if (rho.dim != n) throw DimensionError("teleport_raw_direct: input dimension mismatch");

  const Matrix sigma = resource_sigma(p).matrix;
  const Matrix joint = kron(rho.matrix, sigma);
  const Vector phi = vec_left(Matrix(g.adjoint()));
  const Matrix proj = kron(Matrix(phi * phi.adjoint()), Matrix::Identity(n, n));
  const Matrix measured = proj * joint * proj;
  return partial_trace_first(measured, n * n, n);
}

// kappa_a = dual map of outcome alpha applied to I: g_a* dualTheta(I) g_a.
// Hermitian PSD; the family sums to the identity.
inline Matrix kappa(const Protocol& p, Index alpha) {
  const Matrix& g = detail::alice_element(p, alpha);
  const Matrix dual_id = dual_resource(p.resource, Matrix::Identity(p.dim, p.dim));
  return g.adjoint() * dual_id * g;
}

// Trace-preserving channel for outcome alpha:
// Theta(g_a kappa^{-1/2} rho kappa^{-1/2} g_a*).
inline Matrix channel_ups(const Protocol& p, Index alpha, const InputState& rho) {
  const Matrix& g = detail::alice_element(p, alpha);
  const Matrix kinv = psd_inv_sqrt(kappa(p, alpha));
  return apply_resource(p.resource, g * kinv * rho.matrix * kinv * g.adjoint());
}

// W_a = f g_a kappa_a^{-1/2}: the unitary polar factor of f g_a. Requires a
// pure resource with f g_a full rank.
inline Matrix key_unitary(const Protocol& p, Index alpha) {
  const auto* pure = std::get_if<PureResource>(&p.resource);
  if (!pure) throw Error("key_unitary: keys require a pure resource");
  const Matrix& g = detail::alice_element(p, alpha);
  return pure->f * g * psd_inv_sqrt(kappa(p, alpha));
}

// Bob's correction: W* state W for a unitary key.
inline Matrix recover(const Matrix& state, const Matrix& w) {
  if (w.rows() != w.cols() || w.rows() != state.rows() || state.rows() != state.cols())
    throw DimensionError("recover: dimension mismatch");
  if (max_abs(Matrix(w.adjoint() * w - Matrix::Identity(w.rows(), w.cols()))) > kKeyTol)
    throw Error("recover: key is not unitary");
  return w.adjoint() * state * w;
}

// tr(kappa_a rho); equals tr(teleport_raw(p, alpha, rho)).
inline double outcome_probability(const Protocol& p, Index alpha, const InputState& rho) {
  return std::real((kappa(p, alpha) * rho.matrix).trace());
}

// Luder-rule state on Bob's factor: teleport_raw normalized by its trace.
inline Matrix post_measurement_state(const Protocol& p, Index alpha, const InputState& rho) {
  const double prob = outcome_probability(p, alpha, rho);
  if (prob <= 1e-12) throw ZeroProbabilityError("post_measurement_state: outcome probability " +
                                                std::to_string(prob));
  return teleport_raw(p, alpha, rho) / prob;
}

struct OutcomeResult {
  Index outcome = 0;
  double probability = 0.0;
  Matrix raw_state;
  std::optional<Matrix> key;
  std::optional<Matrix> recovered_state;
  double recovery_error = std::numeric_limits<double>::quiet_NaN();
  bool failed = false;
  std::string failure_reason;
};

// Enumerates all n^2 outcomes. For pure resources each outcome also carries
// the key, the recovered state recover(channel_ups, W), and its max-entry
// distance to the input; a non-normalizable outcome is marked failed with
// the offending eigenvalue instead of aborting the run. Mixed resources
// produce probability and raw-state data only.
inline std::vector<OutcomeResult> run_protocol(const Protocol& p, const InputState& rho) {
  if (rho.dim != p.dim) throw DimensionError("run_protocol: input dimension mismatch");
  const bool pure = std::holds_alternative<PureResource>(p.resource);
  std::vector<OutcomeResult> out;
  const Index count = static_cast<Index>(p.alice_basis.elements.size());
  out.reserve(static_cast<size_t>(count));
  for (Index alpha = 0; alpha < count; ++alpha) {
    OutcomeResult r;
    r.outcome = alpha;
    r.probability = outcome_probability(p, alpha, rho);
    r.raw_state = teleport_raw(p, alpha, rho);
    if (pure) {
      try {
        const Matrix w = key_unitary(p, alpha);
        const Matrix recovered = recover(channel_ups(p, alpha, rho), w);
        r.recovery_error = max_abs(Matrix(recovered - rho.matrix));
        r.key = w;
        r.recovered_state = recovered;
      } catch (const NotNormalizableError& e) {
        r.failed = true;
        r.failure_reason = e.what();
      }
    }
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace qtel
