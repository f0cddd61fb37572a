#pragma once

// Completely positive maps in canonical form: Theta(A) = sum_a w_a f_a A f_a*
// over an orthonormal operator basis, the dual map, and the PSD inverse
// square root used to normalize conditional channels.

#include <string>
#include <vector>

#include "qtel/operator_space.hpp"
#include "qtel/types.hpp"

namespace qtel {

// Canonical form of a CP map: nonnegative weights summing to 1 plus an
// orthonormal basis of Kraus directions.
struct CpMapSpec {
  RealVector weights;
  OperatorBasis basis;
};

// A unit-Hilbert-Schmidt-norm operator f; the rank-1 map A -> f A f*.
struct PureResource {
  Matrix f;
};

inline void validate(const CpMapSpec& t) {
  const Index n = t.basis.dim;
  if (t.weights.size() != n * n)
    throw MalformedStateError("CpMapSpec: expected " + std::to_string(n * n) + " weights");
  double sum = 0.0;
  for (Index a = 0; a < t.weights.size(); ++a) {
    if (t.weights(a) < -kWeightSumTol)
      throw MalformedStateError("CpMapSpec: negative weight " + std::to_string(t.weights(a)));
    sum += t.weights(a);
  }
  if (std::abs(sum - 1.0) > kWeightSumTol)
    throw MalformedStateError("CpMapSpec: weights sum to " + std::to_string(sum) + ", expected 1");
  if (!is_orthonormal_basis(t.basis))
    throw MalformedBasisError("CpMapSpec: basis is not orthonormal");
}

inline void validate(const PureResource& r) {
  if (r.f.rows() != r.f.cols())
    throw DimensionError("PureResource: operator must be square");
  const double norm2 = std::real(hs_inner(r.f, r.f));
  if (std::abs(norm2 - 1.0) > kWeightSumTol)
    throw MalformedStateError("PureResource: tr(f* f) = " + std::to_string(norm2) +
                              ", expected 1");
}

// Theta(A) = sum_a w_a f_a A f_a*. Hermiticity- and positivity-preserving.
inline Matrix apply_cp(const CpMapSpec& t, const Matrix& a) {
  const Index n = t.basis.dim;
  if (a.rows() != n || a.cols() != n)
    throw DimensionError("apply_cp: dimension mismatch");
  Matrix out = Matrix::Zero(n, n);
  for (Index k = 0; k < t.weights.size(); ++k) {
    const auto& f = t.basis.elements[static_cast<std::size_t>(k)];
    out += t.weights(k) * (f * a * f.adjoint());
  }
  return out;
}

// Dual map: tr(A Theta(rho)) = tr(dual(A) rho) for all A, rho.
inline Matrix dual_cp(const CpMapSpec& t, const Matrix& a) {
  const Index n = t.basis.dim;
  if (a.rows() != n || a.cols() != n)
    throw DimensionError("dual_cp: dimension mismatch");
  Matrix out = Matrix::Zero(n, n);
  for (Index k = 0; k < t.weights.size(); ++k) {
    const auto& f = t.basis.elements[static_cast<std::size_t>(k)];
    out += t.weights(k) * (f.adjoint() * a * f);
  }
  return out;
}

// K^{-1/2} for Hermitian PSD K via eigendecomposition. Eigenvalues in
// [-kPsdEigFloor, 0) are clamped to zero; any eigenvalue below
// rel_cutoff * max_eigenvalue fails the rank condition and raises
// NotNormalizableError carrying that eigenvalue.
inline Matrix psd_inv_sqrt(const Matrix& k, double rel_cutoff = kRankRelCutoff) {
  if (!is_hermitian_within(k, kStructuralTol))
    throw MalformedStateError("psd_inv_sqrt: matrix is not Hermitian");
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (k + Matrix(k.adjoint())));
  RealVector eig = es.eigenvalues();
  for (Index i = 0; i < eig.size(); ++i) {
    if (eig(i) < -kPsdEigFloor)
      throw MalformedStateError("psd_inv_sqrt: negative eigenvalue " + std::to_string(eig(i)));
    if (eig(i) < 0.0) eig(i) = 0.0;
  }
  const double emax = eig.maxCoeff();
  for (Index i = 0; i < eig.size(); ++i)
    if (eig(i) < rel_cutoff * emax || emax == 0.0)
      throw NotNormalizableError(
          "psd_inv_sqrt: rank condition failed, eigenvalue " + std::to_string(eig(i)),
          eig(i));
  RealVector inv_sqrt = eig.cwiseSqrt().cwiseInverse();
  return es.eigenvectors() * inv_sqrt.asDiagonal() * es.eigenvectors().adjoint();
}

}  // namespace qtel
