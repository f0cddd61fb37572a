#pragma once

// Qubit (n=2) basis constructions: the spin-matrix basis, bases induced by a
// real orthogonal 4x4 matrix, the three-angle rotation matrix, the rank
// criterion via determinants, and the two-angle diagonal/antidiagonal basis.

#include <cmath>
#include <utility>
#include <vector>

#include "qtel/linalg.hpp"
#include "qtel/operator_space.hpp"
#include "qtel/types.hpp"

namespace qtel {

struct RotationAngles {
  double theta1 = 0.0;
  double theta2 = 0.0;
  double theta3 = 0.0;
};

using RealMatrix = Eigen::MatrixXd;

// {S_0, S_1, S_2, S_3}: identity plus the three spin matrices.
inline std::vector<Matrix> spin_matrices() {
  const Complex i(0.0, 1.0);
  std::vector<Matrix> s(4, Matrix::Zero(2, 2));
  s[0] << 1, 0, 0, 1;
  s[1] << 0, 1, 1, 0;
  s[2] << 0, -i, i, 0;
  s[3] << 1, 0, 0, -1;
  return s;
}

// omega_a = S_a / sqrt(2): an orthonormal basis of Hermitian matrices.
inline OperatorBasis spin_basis() {
  OperatorBasis b;
  b.dim = 2;
  for (const auto& s : spin_matrices()) b.elements.push_back(s / std::sqrt(2.0));
  return b;
}

// 4x4 identity with [[cos, -sin],[sin, cos]] embedded in coordinates (a, b).
inline RealMatrix plane_rotation(Index a, Index b, double theta) {
  if (a < 0 || a > 3 || b < 0 || b > 3 || a == b)
    throw DimensionError("plane_rotation: coordinates must be distinct values in 0..3");
  RealMatrix r = RealMatrix::Identity(4, 4);
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  r(a, a) = c;
  r(a, b) = -s;
  r(b, a) = s;
  r(b, b) = c;
  return r;
}

// C = R_01(t1) R_02(t2) R_03(t3). Entrywise:
//   [ c1c2c3  -s1  -c1s2  -c1c2s3 ]
//   [ s1c2c3   c1  -s1s2  -s1c2s3 ]
//   [ s2c3      0     c2    -s2s3 ]
//   [ s3        0      0       c3 ]
inline RealMatrix rotation_C(const RotationAngles& a) {
  return plane_rotation(0, 1, a.theta1) * plane_rotation(0, 2, a.theta2) *
         plane_rotation(0, 3, a.theta3);
}

inline void require_orthogonal4(const RealMatrix& c, const char* who) {
  if (c.rows() != 4 || c.cols() != 4)
    throw DimensionError(std::string(who) + ": expected a 4x4 matrix");
  if ((c.transpose() * c - RealMatrix::Identity(4, 4)).cwiseAbs().maxCoeff() > kRoundTripTol)
    throw MalformedBasisError(std::string(who) + ": matrix is not orthogonal");
}

// f_a = sum_b C_ab omega_b. Real orthogonal C applied to an ONB of Hermitian
// matrices yields another ONB of Hermitian matrices.
inline OperatorBasis basis_from_orthogonal(const RealMatrix& c, const OperatorBasis& omega) {
  require_orthogonal4(c, "basis_from_orthogonal");
  if (omega.dim != 2 || omega.elements.size() != 4)
    throw MalformedBasisError("basis_from_orthogonal: expected a 4-element qubit basis");
  if (!is_orthonormal_basis(omega))
    throw MalformedBasisError("basis_from_orthogonal: omega is not orthonormal");
  OperatorBasis b;
  b.dim = 2;
  for (Index a = 0; a < 4; ++a) {
    Matrix f = Matrix::Zero(2, 2);
    for (Index bb = 0; bb < 4; ++bb) f += c(a, bb) * omega.elements[static_cast<size_t>(bb)];
    b.elements.push_back(std::move(f));
  }
  return b;
}

// For each f_a of basis_from_orthogonal(C, spin_basis()), pairs the direct
// determinant with the closed form (C_a0^2 - C_a1^2 - C_a2^2 - C_a3^2)/2.
// |det| > 1e-10 is the full-rank criterion.
inline std::vector<std::pair<double, double>> det_formula_check(const RealMatrix& c) {
  require_orthogonal4(c, "det_formula_check");
  const OperatorBasis b = basis_from_orthogonal(c, spin_basis());
  std::vector<std::pair<double, double>> out;
  out.reserve(4);
  for (Index a = 0; a < 4; ++a) {
    const double direct = std::real(b.elements[static_cast<size_t>(a)].determinant());
    const double formula =
        0.5 * (c(a, 0) * c(a, 0) - c(a, 1) * c(a, 1) - c(a, 2) * c(a, 2) - c(a, 3) * c(a, 3));
    out.emplace_back(direct, formula);
  }
  return out;
}

// f_0 = diag(cos t1, sin t1), f_1 = diag(-sin t1, cos t1),
// f_2 = antidiag(cos t2; sin t2), f_3 = antidiag(-sin t2; cos t2).
// Orthonormal for all angles; full rank iff both angles avoid multiples of pi/2.
inline OperatorBasis simple_theta_basis(double theta1, double theta2) {
  const double c1 = std::cos(theta1);
  const double s1 = std::sin(theta1);
  const double c2 = std::cos(theta2);
  const double s2 = std::sin(theta2);
  OperatorBasis b;
  b.dim = 2;
  b.elements.assign(4, Matrix::Zero(2, 2));
  b.elements[0] << c1, 0, 0, s1;
  b.elements[1] << -s1, 0, 0, c1;
  b.elements[2] << 0, c2, s2, 0;
  b.elements[3] << 0, -s2, c2, 0;
  return b;
}

}  // namespace qtel
