#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include "xispec/common.hpp"

// Thin wrappers over Boost.Math quadrature. All of them return the estimate
// together with the achieved error and throw ConvergenceError when the
// requested tolerance was not reached.
namespace xispec::quad {

struct Result {
  double value = 0.0;
  double error = 0.0;
  double l1 = 0.0;
};

// Adaptive Gauss-Kronrod (61 points) on a finite interval. Good for smooth,
// oscillatory integrands. With check = false the caller judges the returned
// error estimate itself (useful when summing panels).
template <class F>
Result gauss_kronrod(F&& f, double a, double b, double rel_tol, double abs_tol,
                     unsigned max_depth = 20, bool check = true) {
  Result r;
  r.value = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
      f, a, b, max_depth, rel_tol, &r.error, &r.l1);
  if (!std::isfinite(r.value)) throw EvaluationError("gauss_kronrod: non-finite integral");
  if (check && r.error > std::max(abs_tol, rel_tol * r.l1))
    throw ConvergenceError("gauss_kronrod: tolerance not achieved", r.error);
  return r;
}

// tanh-sinh on a finite interval; tolerates integrable endpoint singularities.
template <class F>
Result tanh_sinh(F&& f, double a, double b, double rel_tol, double abs_tol) {
  thread_local boost::math::quadrature::tanh_sinh<double> integrator(12);
  Result r;
  try {
    r.value = integrator.integrate(f, a, b, rel_tol, &r.error, &r.l1);
  } catch (const std::domain_error& e) {
    throw EvaluationError(std::string("tanh_sinh: ") + e.what());
  }
  if (!std::isfinite(r.value)) throw EvaluationError("tanh_sinh: non-finite integral");
  if (r.error > std::max(abs_tol, 100.0 * rel_tol * r.l1))
    throw ConvergenceError("tanh_sinh: tolerance not achieved", r.error);
  return r;
}

// exp-sinh on [a, inf).
template <class F>
Result exp_sinh(F&& f, double a, double rel_tol, double abs_tol) {
  thread_local boost::math::quadrature::exp_sinh<double> integrator(12);
  Result r;
  try {
    r.value = integrator.integrate(f, a, std::numeric_limits<double>::infinity(), rel_tol,
                                   &r.error, &r.l1);
  } catch (const std::domain_error& e) {
    throw EvaluationError(std::string("exp_sinh: ") + e.what());
  }
  if (!std::isfinite(r.value)) throw EvaluationError("exp_sinh: non-finite integral");
  if (r.error > std::max(abs_tol, 100.0 * rel_tol * r.l1))
    throw ConvergenceError("exp_sinh: tolerance not achieved", r.error);
  return r;
}

// [a, b) with b possibly infinite.
template <class F>
Result to_upper(F&& f, double a, double b, double rel_tol, double abs_tol) {
  if (std::isinf(b)) return exp_sinh(std::forward<F>(f), a, rel_tol, abs_tol);
  return tanh_sinh(std::forward<F>(f), a, b, rel_tol, abs_tol);
}

// Complex-valued integrand, integrated component-wise.
template <class F, class Rule>
Complex complex_integral(F&& f, Rule&& rule) {
  const double re = rule([&](double x) { return std::real(f(x)); }).value;
  const double im = rule([&](double x) { return std::imag(f(x)); }).value;
  return {re, im};
}

}  // namespace xispec::quad
