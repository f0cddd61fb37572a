#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace qtel {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;
using Index = Eigen::Index;

// Default tolerances. Structural checks (orthonormality, Hermiticity,
// projector axioms) use 1e-10; pure-arithmetic round trips 1e-12; key
// unitarity and recovery 1e-9. All chosen for double precision at n <= 8.
inline constexpr double kStructuralTol = 1e-10;
inline constexpr double kRoundTripTol = 1e-12;
inline constexpr double kKeyTol = 1e-9;
inline constexpr double kRankRelCutoff = 1e-10;
inline constexpr double kPsdEigFloor = 1e-12;
inline constexpr double kWeightSumTol = 1e-12;

class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class DimensionError : public Error {
public:
  using Error::Error;
};

class MalformedBasisError : public Error {
public:
  using Error::Error;
};

class MalformedStateError : public Error {
public:
  using Error::Error;
};

// Raised when a normalization sandwich K^{-1/2} does not exist because K is
// numerically rank-deficient. Carries the offending eigenvalue.
class NotNormalizableError : public Error {
public:
  NotNormalizableError(const std::string& msg, double eigenvalue)
      : Error(msg), eigenvalue_(eigenvalue) {}
  double eigenvalue() const { return eigenvalue_; }

private:
  double eigenvalue_;
};

class ZeroProbabilityError : public Error {
public:
  using Error::Error;
};

class ConfigError : public Error {
public:
  using Error::Error;
};

}  // namespace qtel
