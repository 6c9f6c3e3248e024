#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace sunsc {

template <typename Real>
using ComplexT = std::complex<Real>;
template <typename Real>
using VectorT = Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, 1>;
template <typename Real>
using MatrixT = Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, Eigen::Dynamic>;

using Complex = std::complex<double>;
using Vector = Eigen::VectorXcd;
using Matrix = Eigen::MatrixXcd;

inline constexpr Complex kI{0.0, 1.0};

/// Bilinear (non-conjugating) product a.b; Eigen's dot() conjugates a.
template <typename A, typename B>
auto bdot(const Eigen::MatrixBase<A>& a, const Eigen::MatrixBase<B>& b) {
  return (a.array() * b.array()).sum();
}

// Error taxonomy. Every failure the engine can report derives from Error so
// the CLI can map it onto an exit code without string matching.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class CapacityError : public Error {
 public:
  CapacityError(const std::string& what, long long required)
      : Error(what), required_(required) {}
  long long required() const { return required_; }

 private:
  long long required_;
};

class DimensionError : public Error {
  using Error::Error;
};
class ValidationError : public Error {
  using Error::Error;
};
class SingularityError : public Error {
  using Error::Error;
};
class NumericalError : public Error {
  using Error::Error;
};

class IntegrationError : public Error {
 public:
  IntegrationError(const std::string& what, double blowup_time)
      : Error(what), blowup_time_(blowup_time) {}
  double blowup_time() const { return blowup_time_; }

 private:
  double blowup_time_;
};

class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, double best_residual)
      : Error(what), best_residual_(best_residual) {}
  double best_residual() const { return best_residual_; }

 private:
  double best_residual_;
};

class CausticError : public Error {
 public:
  CausticError(const std::string& what, double det_ratio)
      : Error(what), det_ratio_(det_ratio) {}
  double det_ratio() const { return det_ratio_; }

 private:
  double det_ratio_;
};

class ContinuationError : public Error {
  using Error::Error;
};
class ConfigError : public Error {
  using Error::Error;
};

}  // namespace sunsc
