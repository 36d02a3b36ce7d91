#pragma once

#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

namespace xispec {

using Complex = std::complex<double>;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Error hierarchy. Every numeric failure surfaces as one of these; the CLI maps
// them to exit code 3 and a one-line diagnostic.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DomainError : public NumericError {
 public:
  using NumericError::NumericError;
};

class RangeError : public NumericError {
 public:
  using NumericError::NumericError;
};

class ConvergenceError : public NumericError {
 public:
  ConvergenceError(const std::string& what, double achieved_error)
      : NumericError(what), achieved_error_(achieved_error) {}
  double achieved_error() const noexcept { return achieved_error_; }

 private:
  double achieved_error_;
};

class IntegrationError : public NumericError {
 public:
  using NumericError::NumericError;
};

class ValidationError : public NumericError {
 public:
  using NumericError::NumericError;
};

class SeedError : public NumericError {
 public:
  using NumericError::NumericError;
};

class EvaluationError : public NumericError {
 public:
  using NumericError::NumericError;
};

class ResolutionError : public NumericError {
 public:
  using NumericError::NumericError;
};

inline bool is_finite(double x) { return std::isfinite(x); }
inline bool is_finite(const Complex& z) {
  return std::isfinite(z.real()) && std::isfinite(z.imag());
}

template <class T>
const T& require_finite(const T& v, const char* where) {
  if (!is_finite(v)) throw EvaluationError(std::string(where) + ": non-finite value");
  return v;
}

template <class T>
struct ScalarTraits;

template <>
struct ScalarTraits<double> {
  static double from_complex(const Complex& z) { return z.real(); }
};

template <>
struct ScalarTraits<Complex> {
  static Complex from_complex(const Complex& z) { return z; }
};

// A value carried as mantissa * exp(log_scale). Used wherever magnitudes leave
// the double range (shooting amplitudes, xi far off the real axis, Whittaker
// functions of large order).
template <class T>
struct Scaled {
  T mantissa{};
  double log_scale = 0.0;

  double log_abs() const { return std::log(std::abs(mantissa)) + log_scale; }

  T value() const {
    if (mantissa == T{}) return T{};
    const double la = log_abs();
    if (la > std::log(std::numeric_limits<double>::max()))
      throw RangeError("scaled value overflows double range (log|v| = " + std::to_string(la) + ")");
    return mantissa * std::exp(log_scale);
  }

  // Base-10 split: value = m * 10^e with 1 <= |m| < 10.
  std::pair<T, long> decimal() const {
    if (mantissa == T{}) return {T{}, 0};
    const double l10 = log_abs() / std::log(10.0);
    const long e = static_cast<long>(std::floor(l10));
    const double mag = std::pow(10.0, l10 - static_cast<double>(e));
    return {mantissa / std::abs(mantissa) * mag, e};
  }
};

inline Scaled<Complex> scaled_from_log(const Complex& log_value) {
  return {std::polar(1.0, log_value.imag()), log_value.real()};
}

}  // namespace xispec
