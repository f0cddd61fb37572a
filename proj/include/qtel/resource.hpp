#pragma once

// Entangled resource states on the bipartite space, the projector families
// induced by an operator basis, and pure-state entanglement diagnostics.

#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "qtel/channels.hpp"
#include "qtel/linalg.hpp"
#include "qtel/operator_space.hpp"
#include "qtel/types.hpp"

namespace qtel {

// Density matrix on C^n (x) C^n: Hermitian, PSD, unit trace.
struct BipartiteState {
  Index dim = 0;
  Matrix matrix;
};

inline BipartiteState make_bipartite_state(Index dim, Matrix m) {
  if (m.rows() != dim * dim || m.cols() != dim * dim)
    throw DimensionError("BipartiteState: expected n^2 x n^2 matrix");
  if (!is_hermitian_within(m, kStructuralTol))
    throw MalformedStateError("BipartiteState: matrix is not Hermitian");
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (m + Matrix(m.adjoint())),
                                           Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < -kStructuralTol)
    throw MalformedStateError("BipartiteState: negative eigenvalue " +
                              std::to_string(es.eigenvalues().minCoeff()));
  if (std::abs(std::real(m.trace()) - 1.0) > kStructuralTol ||
      std::abs(std::imag(m.trace())) > kStructuralTol)
    throw MalformedStateError("BipartiteState: trace is not 1");
  return BipartiteState{dim, std::move(m)};
}

enum class Side { left, right };

struct ProjectorFamily {
  Index dim = 0;
  std::vector<Matrix> projectors;
};

namespace detail {

inline void require_hs_normalized(const Matrix& f, const char* who) {
  if (f.rows() != f.cols()) throw DimensionError(std::string(who) + ": operator must be square");
  const double norm2 = std::real(hs_inner(f, f));
  if (std::abs(norm2 - 1.0) > kStructuralTol)
    throw MalformedStateError(std::string(who) + ": tr(f* f) = " + std::to_string(norm2) +
                              ", expected 1");
}

template <typename Map>
std::vector<Matrix> images_on_units(Index n, Map&& phi) {
  const OperatorBasis units = matrix_units(n);
  std::vector<Matrix> images;
  images.reserve(units.elements.size());
  for (const auto& e : units.elements) images.push_back(phi(e));
  return images;
}

}  // namespace detail

// sum_ij f e_ij f* (x) e_ij, the rank-1 projector onto vec_left(f).
inline Matrix projector_P(const Matrix& f) {
  detail::require_hs_normalized(f, "projector_P");
  return superop_left(detail::images_on_units(f.rows(), [&](const Matrix& e) {
    return Matrix(f * e * f.adjoint());
  }));
}

// sum_ij e_ij (x) f e_ij f*, the rank-1 projector onto vec_right(f).
inline Matrix projector_Q(const Matrix& f) {
  detail::require_hs_normalized(f, "projector_Q");
  return superop_right(detail::images_on_units(f.rows(), [&](const Matrix& e) {
    return Matrix(f * e * f.adjoint());
  }));
}

// The full family over an orthonormal basis: mutually orthogonal projectors
// resolving the identity of the bipartite space.
inline ProjectorFamily projector_family(const OperatorBasis& b, Side side) {
  if (!is_orthonormal_basis(b))
    throw MalformedBasisError("projector_family: basis is not orthonormal");
  ProjectorFamily fam;
  fam.dim = b.dim;
  fam.projectors.reserve(b.elements.size());
  for (const auto& f : b.elements)
    fam.projectors.push_back(side == Side::left ? projector_P(f) : projector_Q(f));
  return fam;
}

// The bipartite state sum_ij e_ij (x) Theta(e_ij) of a CP map; its spectrum
// is the weight vector of the map.
inline BipartiteState sigma_from_cp(const CpMapSpec& t) {
  validate(t);
  const Index n = t.basis.dim;
  Matrix sigma = superop_right(detail::images_on_units(n, [&](const Matrix& e) {
    return apply_cp(t, e);
  }));
  return make_bipartite_state(n, std::move(sigma));
}

// Pure analogue: sum_ij e_ij (x) f e_ij f*, a rank-1 state.
inline BipartiteState sigma_from_pure(const PureResource& r) {
  validate(r);
  return make_bipartite_state(r.f.rows(), projector_Q(r.f));
}

// Singular values of f, descending. Their squares are the Schmidt spectrum
// of the bipartite vector represented by f.
inline RealVector schmidt_values(const Matrix& f) {
  detail::require_hs_normalized(f, "schmidt_values");
  Eigen::JacobiSVD<Matrix> svd(f);
  return svd.singularValues();
}

// Entanglement entropy in bits: -sum s^2 log2 s^2, with 0 log 0 = 0.
inline double entanglement_entropy(const Matrix& f) {
  const RealVector s = schmidt_values(f);
  double h = 0.0;
  for (Index i = 0; i < s.size(); ++i) {
    const double p = s(i) * s(i);
    if (p > 0.0) h -= p * std::log2(p);
  }
  return h;
}

// Maximal entanglement test: f* f = f f* = I/n within tol (equivalently
// f = U/sqrt(n) with U unitary).
inline bool is_maximally_entangled(const Matrix& f, double tol = kStructuralTol) {
  detail::require_hs_normalized(f, "is_maximally_entangled");
  const Index n = f.rows();
  const Matrix target = Matrix::Identity(n, n) / static_cast<double>(n);
  return max_abs(Matrix(f.adjoint() * f - target)) <= tol &&
         max_abs(Matrix(f * f.adjoint() - target)) <= tol;
}

}  // namespace qtel
