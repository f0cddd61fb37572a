#pragma once

#include <cmath>

#include <unsupported/Eigen/KroneckerProduct>

#include "qtel/types.hpp"

namespace qtel {

// Max-entry modulus. The distance measure used by every structural check.
inline double max_abs(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  return m.cwiseAbs().maxCoeff();
}

inline double max_abs(const Vector& v) {
  if (v.size() == 0) return 0.0;
  return v.cwiseAbs().maxCoeff();
}

inline bool is_hermitian_within(const Matrix& m, double tol) {
  if (m.rows() != m.cols()) return false;
  return max_abs(Matrix(m - m.adjoint())) <= tol;
}

// Kronecker product. The first factor is the slow (most significant) index:
// (A (x) B)[i*p+k, j*q+l] = A[i,j] B[k,l] for B of size p x q, so e_i (x) e_j
// sits at position i*n + j (0-based). Every tensor construction in the
// library relies on this one convention.
inline Matrix kron(const Matrix& a, const Matrix& b) {
  return Eigen::kroneckerProduct(a, b);
}

// Partial trace over the first factor of a (da*db) x (da*db) matrix.
inline Matrix partial_trace_first(const Matrix& m, Index da, Index db) {
  if (m.rows() != da * db || m.cols() != da * db)
    throw DimensionError("partial_trace_first: matrix does not factor as da*db");
  Matrix out = Matrix::Zero(db, db);
  for (Index i = 0; i < da; ++i)
    out += m.block(i * db, i * db, db, db);
  return out;
}

// Partial trace over the second factor.
inline Matrix partial_trace_second(const Matrix& m, Index da, Index db) {
  if (m.rows() != da * db || m.cols() != da * db)
    throw DimensionError("partial_trace_second: matrix does not factor as da*db");
  Matrix out = Matrix::Zero(da, da);
  for (Index i = 0; i < da; ++i)
    for (Index j = 0; j < da; ++j) {
      Complex s = 0.0;
      for (Index k = 0; k < db; ++k) s += m(i * db + k, j * db + k);
      out(i, j) = s;
    }
  return out;
}

}  // namespace qtel
