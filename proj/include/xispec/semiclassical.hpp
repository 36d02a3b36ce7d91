#pragma once

#include <functional>
#include <vector>

#include "xispec/common.hpp"

namespace xispec {

/// w(v): measure of {x : V(x) <= v}, or equivalently its inverse v(w).
///
/// Two representations:
///  * exp_quadratic: v(w) = 4 pi^2 e^{2w} - beta e^w + gamma for w >= 0.
///  * sampled: piecewise-linear w(v) through (v_i, w_i). Repeated v values
///    encode a jump (a plateau of V). Above the last sample the width
///    continues as w_last + c log(v / v_last), c = tail_log_coefficient.
class WidthFunction {
 public:
  enum class Kind { ExpQuadratic, Sampled };

  static WidthFunction exp_quadratic(double beta, double gamma);
  static WidthFunction sampled(std::vector<double> v, std::vector<double> w,
                               double tail_log_coefficient = 0.5);

  Kind kind() const { return kind_; }
  double beta() const { return beta_; }
  double gamma() const { return gamma_; }
  const std::vector<double>& v_samples() const { return v_; }
  const std::vector<double>& w_samples() const { return w_; }
  double tail_log_coefficient() const { return tail_c_; }

  /// Bottom of the potential: v(0) or the first sample.
  double v_min() const;
  /// w(v); 0 below v_min.
  double width(double v) const;
  /// v(w) for w >= 0.
  double height(double w) const;

 private:
  Kind kind_ = Kind::ExpQuadratic;
  double beta_ = 0.0;
  double gamma_ = 0.0;
  std::vector<double> v_;
  std::vector<double> w_;
  double tail_c_ = 0.5;
};

/// W(E) together with its derivative; W = 0 below e_min.
class CountingFunction {
 public:
  using Fn = std::function<double(double)>;

  /// 2 sqrt(E) log(sqrt(E)/(pi e)) for E > 0, i.e. 2 pi times the leading
  /// zero count of Xi. With smoothed, the constant 2 pi * 7/8 is added for E > 0.
  static CountingFunction riemann(bool smoothed = false);
  /// Exact Weyl action of v(w) = 4 pi^2 e^{2w}:
  /// 2 sqrt(E) (artanh q - q), q = sqrt(1 - 4 pi^2 / E), E > 4 pi^2.
  static CountingFunction exponential_weyl();
  /// Arbitrary smooth W on (e_min, inf) given with its derivative.
  static CountingFunction analytic(Fn value, Fn derivative, double e_min);
  /// Piecewise-linear through (E_i, W_i); E strictly increasing, W nondecreasing.
  static CountingFunction sampled(std::vector<double> E, std::vector<double> W);

  /// Adds c log E for E >= 1 (zero below). Analytic counting functions only.
  CountingFunction plus_log(double c) const;

  double value(double E) const;
  double derivative(double E) const;
  double e_min() const { return e_min_; }
  bool is_sampled() const { return !E_.empty(); }
  const std::vector<double>& E_samples() const { return E_; }
  const std::vector<double>& W_samples() const { return W_; }
  /// Points above e_min where dW/dE is discontinuous.
  const std::vector<double>& kinks() const { return kinks_; }

 private:
  Fn value_;
  Fn derivative_;
  double e_min_ = 0.0;
  double jump_at_min_ = 0.0;  // W(e_min+), a point mass of dW at e_min
  std::vector<double> E_;
  std::vector<double> W_;
  std::vector<double> kinks_;
};

/// W(E) = 2 int sqrt(E - v) dw(v).
double weyl_action(const WidthFunction& width, double E);

/// w(v) = (1/pi) int dW(E) / sqrt(v - E). Analytic counting functions use
/// E = e_min + (v - e_min) sin^2(theta); sampled ones are integrated exactly
/// segment by segment and checked against the half-resolution grid.
double abel_invert(const CountingFunction& counting, double v, double rel_tol = 1e-6);

/// T(E) = 1/2 int dw / sqrt(v(w) - E) for E < v_min. Closed form for the
/// exp_quadratic family, exact segment sums for sampled widths.
double imaginary_time(const WidthFunction& width, double E);

/// T(E) by direct quadrature in w (exp_quadratic family only).
double imaginary_time_quadrature(const WidthFunction& width, double E);

/// Leading form of T: (1/(2 sqrt(-E))) log(sqrt(-E)/pi) - kappa/(2E).
double imaginary_time_expansion(double E, double kappa);

/// beta = 4 pi kappa, checked against the T(E) expansion at E = -1e6.
double fit_beta(double target_kappa);

/// N(Omega) = (Omega/2pi) log(Omega/(2 pi e)) [+ 7/8].
double riemann_count(double Omega, bool smoothed = false);

/// d/dE log Xi ~ -(1/(2 sqrt(-E))) log(sqrt(-E)/pi) + 7/(8E).
double xi_logderiv_asymptotic(double E);

/// The Whittaker shooting analogue, with the extra
/// gamma/(4(-E)^{3/2}) log(sqrt(-E)/(pi e)) term.
double whittaker_logderiv_asymptotic(double E, double gamma);

/// Least-squares slope of log|y| against log x.
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace xispec
