#pragma once

#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace eitnoise {

using Complex = std::complex<double>;

inline constexpr int kDim = 12;
inline constexpr Complex kI{0.0, 1.0};
inline constexpr double kPi = std::numbers::pi;

using Vector12 = Eigen::Matrix<Complex, kDim, 1>;
using Matrix12 = Eigen::Matrix<Complex, kDim, kDim>;

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input problems: bad parameters, malformed scenario files. The CLI maps these to exit code 2.
class InputError : public Error {
 public:
  using Error::Error;
};

class InvalidParameters : public InputError {
 public:
  using InputError::InputError;
};

/// Numeric failures. The CLI maps these to exit code 3.
class NumericError : public Error {
 public:
  using Error::Error;
};

class DegenerateSteadyState : public NumericError {
 public:
  using NumericError::NumericError;
};

class NoConvergence : public NumericError {
 public:
  using NumericError::NumericError;
};

class NonStationaryState : public NumericError {
 public:
  using NumericError::NumericError;
};

class EigenFailure : public NumericError {
 public:
  using NumericError::NumericError;
};

class SingularLyapunov : public NumericError {
 public:
  using NumericError::NumericError;
};

class SingularAtFrequency : public NumericError {
 public:
  using NumericError::NumericError;
};

class DomainError : public NumericError {
 public:
  using NumericError::NumericError;
};

/// Not a failure of the pipeline: the scanned spectrum is monotone or flat.
class NoExtrema : public Error {
 public:
  using Error::Error;
};

}  // namespace eitnoise
