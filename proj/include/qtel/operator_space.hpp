#pragma once

// The Hilbert-Schmidt space of n x n complex matrices: inner product,
// matrix units, the left/right vectorization isometries into C^n (x) C^n,
// superoperator representations in M_n (x) M_n, and decomposition of an
// arbitrary linear map over an orthonormal operator basis.

#include <cstdint>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "qtel/linalg.hpp"
#include "qtel/types.hpp"

namespace qtel {

// An ordered family of n^2 operators, orthonormal under tr(A* B).
struct OperatorBasis {
  Index dim = 0;
  std::vector<Matrix> elements;

  Index size() const { return static_cast<Index>(elements.size()); }
};

// Hilbert-Schmidt inner product tr(A* B); conjugate-linear in A.
inline Complex hs_inner(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw DimensionError("hs_inner: dimension mismatch");
  return (a.adjoint() * b).trace();
}

// The n^2 matrix units |e_i><e_j|, ordered row-major by (i, j).
inline OperatorBasis matrix_units(Index n) {
  if (n < 1) throw DimensionError("matrix_units: dimension must be positive");
  OperatorBasis b;
  b.dim = n;
  b.elements.reserve(static_cast<std::size_t>(n * n));
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) {
      Matrix e = Matrix::Zero(n, n);
      e(i, j) = 1.0;
      b.elements.push_back(std::move(e));
    }
  return b;
}

// Left vectorization A -> sum_i (A e_i) (x) e_i. Component (i*n + j) is
// A[i,j], i.e. the row-major flattening. Isometric for hs_inner.
inline Vector vec_left(const Matrix& a) {
  if (a.rows() != a.cols()) throw DimensionError("vec_left: matrix must be square");
  const Index n = a.rows();
  Vector v(n * n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) v(i * n + j) = a(i, j);
  return v;
}

// Right vectorization A -> sum_i e_i (x) (A e_i). Component (i*n + j) is
// A[j,i]. Isometric for hs_inner.
inline Vector vec_right(const Matrix& a) {
  if (a.rows() != a.cols()) throw DimensionError("vec_right: matrix must be square");
  const Index n = a.rows();
  Vector v(n * n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) v(i * n + j) = a(j, i);
  return v;
}

// Inverse of vec_left.
inline Matrix devec_left(const Vector& v) {
  const auto len = v.size();
  const Index n = static_cast<Index>(std::llround(std::sqrt(static_cast<double>(len))));
  if (n * n != len)
    throw DimensionError("devec_left: vector length is not a perfect square");
  Matrix a(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) a(i, j) = v(i * n + j);
  return a;
}

// True iff the Gram matrix tr(f_a* f_b) is the identity within tol.
inline bool is_orthonormal_basis(const OperatorBasis& b, double tol = kStructuralTol) {
  const Index n = b.dim;
  if (b.size() != n * n)
    throw MalformedBasisError("is_orthonormal_basis: expected " + std::to_string(n * n) +
                              " elements, got " + std::to_string(b.size()));
  for (const auto& e : b.elements)
    if (e.rows() != n || e.cols() != n)
      throw MalformedBasisError("is_orthonormal_basis: element dimension mismatch");
  for (Index p = 0; p < b.size(); ++p)
    for (Index q = 0; q < b.size(); ++q) {
      const Complex g = hs_inner(b.elements[p], b.elements[q]);
      const Complex expect = (p == q) ? 1.0 : 0.0;
      if (std::abs(g - expect) > tol) return false;
    }
  return true;
}

// f_a A f_b*, the elementary double-index map applied to A.
inline Matrix sandwich(const Matrix& f_a, const Matrix& f_b, const Matrix& a) {
  if (f_a.rows() != a.rows() || f_b.rows() != a.rows())
    throw DimensionError("sandwich: dimension mismatch");
  return f_a * a * f_b.adjoint();
}

// Deterministic orthonormal basis from seeded complex-Gaussian draws,
// orthonormalized with (twice-iterated) Gram-Schmidt under hs_inner.
inline OperatorBasis random_onb(Index n, std::uint64_t seed) {
  if (n < 1) throw DimensionError("random_onb: dimension must be positive");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const Index count = n * n;

  for (int attempt = 0; attempt < 8; ++attempt) {
    std::vector<Matrix> draws;
    draws.reserve(static_cast<std::size_t>(count));
    for (Index k = 0; k < count; ++k) {
      Matrix g(n, n);
      for (Index i = 0; i < n; ++i)
        for (Index j = 0; j < n; ++j) g(i, j) = Complex(gauss(rng), gauss(rng));
      draws.push_back(std::move(g));
    }

    OperatorBasis b;
    b.dim = n;
    bool degenerate = false;
    for (Index k = 0; k < count && !degenerate; ++k) {
      Matrix v = draws[static_cast<std::size_t>(k)];
      for (int pass = 0; pass < 2; ++pass)
        for (const auto& u : b.elements) v -= hs_inner(u, v) * u;
      const double norm = std::sqrt(std::real(hs_inner(v, v)));
      if (norm < 1e-8) {
        degenerate = true;
        break;
      }
      b.elements.push_back(v / norm);
    }
    if (!degenerate) return b;
  }
  throw Error("random_onb: degenerate draw persisted after bounded retries");
}

// sum_k images[k] (x) e_k with e_k the k-th matrix unit (row-major order);
// the matrix of the map in M_n (x) M_n with its action on the left leg.
inline Matrix superop_left(const std::vector<Matrix>& images) {
  const Index n2 = static_cast<Index>(images.size());
  const Index n = static_cast<Index>(std::llround(std::sqrt(static_cast<double>(n2))));
  if (n * n != n2 || n2 == 0)
    throw DimensionError("superop_left: need n^2 images");
  const OperatorBasis units = matrix_units(n);
  Matrix out = Matrix::Zero(n * n, n * n);
  for (Index k = 0; k < n2; ++k)
    out += kron(images[static_cast<std::size_t>(k)], units.elements[static_cast<std::size_t>(k)]);
  return out;
}

// sum_k e_k (x) images[k], the right-leg placement.
inline Matrix superop_right(const std::vector<Matrix>& images) {
  const Index n2 = static_cast<Index>(images.size());
  const Index n = static_cast<Index>(std::llround(std::sqrt(static_cast<double>(n2))));
  if (n * n != n2 || n2 == 0)
    throw DimensionError("superop_right: need n^2 images");
  const OperatorBasis units = matrix_units(n);
  Matrix out = Matrix::Zero(n * n, n * n);
  for (Index k = 0; k < n2; ++k)
    out += kron(units.elements[static_cast<std::size_t>(k)], images[static_cast<std::size_t>(k)]);
  return out;
}

// Coefficients c_{ab} of a map against the double-index family built from b:
// the map acting as e_k -> images[k] is sum_{ab} c_{ab} f_a (.) f_b*.
// For a Hermiticity-preserving map the coefficient matrix is Hermitian.
inline Matrix decompose_map(const std::vector<Matrix>& images, const OperatorBasis& b) {
  const Index n = b.dim;
  if (static_cast<Index>(images.size()) != n * n)
    throw DimensionError("decompose_map: need n^2 images");
  if (!is_orthonormal_basis(b))
    throw MalformedBasisError("decompose_map: basis is not orthonormal");
  const OperatorBasis units = matrix_units(n);
  Matrix c(n * n, n * n);
  for (Index alpha = 0; alpha < n * n; ++alpha)
    for (Index beta = 0; beta < n * n; ++beta) {
      Complex acc = 0.0;
      for (Index k = 0; k < n * n; ++k) {
        const Matrix lhs = sandwich(b.elements[static_cast<std::size_t>(alpha)],
                                    b.elements[static_cast<std::size_t>(beta)],
                                    units.elements[static_cast<std::size_t>(k)]);
        acc += hs_inner(lhs, images[static_cast<std::size_t>(k)]);
      }
      c(alpha, beta) = acc;
    }
  return c;
}

struct CanonicalForm {
  OperatorBasis basis;     // g_a = sum_b V[b,a] f_b, orthonormal
  RealVector weights;      // real eigenvalues c_a, ascending
};

// Diagonalize a Hermitian coefficient matrix: the map becomes
// sum_a c_a g_a (.) g_a*. Eigenvalues ascend; each eigenvector's phase is
// fixed so its largest-magnitude entry is real positive.
inline CanonicalForm canonical_form(const Matrix& c, const OperatorBasis& b) {
  const Index n2 = c.rows();
  if (c.cols() != n2 || b.size() != n2)
    throw DimensionError("canonical_form: coefficient/basis size mismatch");
  if (!is_hermitian_within(c, kStructuralTol))
    throw MalformedStateError("canonical_form: coefficient matrix is not Hermitian");

  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (c + Matrix(c.adjoint())));
  Matrix v = es.eigenvectors();
  for (Index k = 0; k < n2; ++k) {
    Index imax = 0;
    double amax = 0.0;
    for (Index i = 0; i < n2; ++i) {
      const double a = std::abs(v(i, k));
      if (a > amax) {
        amax = a;
        imax = i;
      }
    }
    const Complex pivot = v(imax, k);
    if (std::abs(pivot) > 0.0) v.col(k) *= std::conj(pivot) / std::abs(pivot);
  }

  CanonicalForm out;
  out.weights = es.eigenvalues();
  out.basis.dim = b.dim;
  out.basis.elements.reserve(static_cast<std::size_t>(n2));
  for (Index k = 0; k < n2; ++k) {
    Matrix g = Matrix::Zero(b.dim, b.dim);
    for (Index a = 0; a < n2; ++a) g += v(a, k) * b.elements[static_cast<std::size_t>(a)];
    out.basis.elements.push_back(std::move(g));
  }
  return out;
}

}  // namespace qtel
