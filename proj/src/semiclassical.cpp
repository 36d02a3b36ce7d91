#include "xispec/semiclassical.hpp"

#include <algorithm>
#include <cmath>

#include "xispec/quadrature.hpp"

namespace xispec {

namespace {

constexpr double kFourPi2 = 4.0 * kPi * kPi;
constexpr double kEightPi2 = 8.0 * kPi * kPi;

// int_V^inf dv / (v sqrt(v - E)), V > 0, V > E.
double log_tail_time(double V, double E) {
  const double U = std::sqrt(V - E);
  if (E < 0.0) {
    const double ra = std::sqrt(-E);
    return std::log((U + ra) / (U - ra)) / ra;
  }
  if (E == 0.0) return 2.0 / U;
  const double re = std::sqrt(E);
  return 2.0 / re * (0.5 * kPi - std::atan(U / re));
}

// int_V^E sqrt(E - v) / v dv for 0 < V < E.
double log_tail_action(double V, double E) {
  const double U = std::sqrt(E - V);
  const double re = std::sqrt(E);
  return 2.0 * (re * std::atanh(U / re) - U);
}

}  // namespace

// -------------------------------------------------------------- WidthFunction

WidthFunction WidthFunction::exp_quadratic(double beta, double gamma) {
  if (!std::isfinite(beta) || !std::isfinite(gamma))
    throw ValidationError("WidthFunction: non-finite parameters");
  if (beta > kEightPi2)
    throw ValidationError("WidthFunction: beta > 8 pi^2 makes v(w) non-monotone");
  WidthFunction f;
  f.kind_ = Kind::ExpQuadratic;
  f.beta_ = beta;
  f.gamma_ = gamma;
  return f;
}

WidthFunction WidthFunction::sampled(std::vector<double> v, std::vector<double> w,
                                     double tail_log_coefficient) {
  if (v.size() != w.size() || v.size() < 2)
    throw ValidationError("WidthFunction: need at least two (v, w) samples of equal length");
  for (std::size_t i = 0; i < v.size(); ++i)
    if (!std::isfinite(v[i]) || !std::isfinite(w[i]))
      throw ValidationError("WidthFunction: non-finite sample");
  if (w.front() < 0.0) throw ValidationError("WidthFunction: negative width");
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (v[i] < v[i - 1] || w[i] < w[i - 1])
      throw ValidationError("WidthFunction: samples must be nondecreasing in v and w");
    if (v[i] == v[i - 1] && w[i] == w[i - 1])
      throw ValidationError("WidthFunction: duplicate sample");
  }
  if (!(tail_log_coefficient >= 0.0))
    throw ValidationError("WidthFunction: tail coefficient must be >= 0");
  if (tail_log_coefficient > 0.0 && v.back() <= 0.0)
    throw ValidationError("WidthFunction: logarithmic tail needs a positive last sample");
  WidthFunction f;
  f.kind_ = Kind::Sampled;
  f.v_ = std::move(v);
  f.w_ = std::move(w);
  f.tail_c_ = tail_log_coefficient;
  return f;
}

double WidthFunction::v_min() const {
  if (kind_ == Kind::ExpQuadratic) return kFourPi2 - beta_ + gamma_;
  return v_.front();
}

double WidthFunction::width(double v) const {
  if (v < v_min()) return 0.0;
  if (kind_ == Kind::ExpQuadratic) {
    const double ew = (beta_ + std::sqrt(beta_ * beta_ + 16.0 * kPi * kPi * (v - gamma_))) / kEightPi2;
    return std::max(0.0, std::log(ew));
  }
  if (v >= v_.back()) return w_.back() + tail_c_ * std::log(v / v_.back());
  // Last index with v_i <= v; within a jump this takes the upper value.
  const auto it = std::upper_bound(v_.begin(), v_.end(), v);
  const std::size_t j = static_cast<std::size_t>(it - v_.begin());
  const std::size_t i = j - 1;
  if (v_[j] == v_[i]) return w_[j];
  return w_[i] + (w_[j] - w_[i]) * (v - v_[i]) / (v_[j] - v_[i]);
}

double WidthFunction::height(double w) const {
  if (w < 0.0) throw DomainError("WidthFunction::height: w must be >= 0");
  if (kind_ == Kind::ExpQuadratic) {
    const double e = std::exp(w);
    return e * (kFourPi2 * e - beta_) + gamma_;
  }
  if (w <= w_.front()) return v_.front();
  if (w >= w_.back()) {
    if (tail_c_ == 0.0) throw DomainError("WidthFunction::height: w beyond the sampled range");
    return v_.back() * std::exp((w - w_.back()) / tail_c_);
  }
  const auto it = std::lower_bound(w_.begin(), w_.end(), w);
  const std::size_t j = static_cast<std::size_t>(it - w_.begin());
  const std::size_t i = j - 1;
  return v_[i] + (v_[j] - v_[i]) * (w - w_[i]) / (w_[j] - w_[i]);
}

// ----------------------------------------------------------- CountingFunction

CountingFunction CountingFunction::riemann(bool smoothed) {
  CountingFunction c;
  c.e_min_ = 0.0;
  const double shift = smoothed ? 2.0 * kPi * 7.0 / 8.0 : 0.0;
  c.jump_at_min_ = shift;
  c.value_ = [shift](double E) {
    const double r = std::sqrt(E);
    return 2.0 * r * std::log(r / (kPi * std::exp(1.0))) + shift;
  };
  c.derivative_ = [](double E) {
    const double r = std::sqrt(E);
    return std::log(r / kPi) / r;
  };
  return c;
}

CountingFunction CountingFunction::exponential_weyl() {
  CountingFunction c;
  c.e_min_ = kFourPi2;
  c.value_ = [](double E) {
    const double q = std::sqrt(1.0 - kFourPi2 / E);
    return 2.0 * std::sqrt(E) * (std::atanh(q) - q);
  };
  c.derivative_ = [](double E) {
    const double q = std::sqrt(1.0 - kFourPi2 / E);
    return std::atanh(q) / std::sqrt(E);
  };
  return c;
}

CountingFunction CountingFunction::analytic(Fn value, Fn derivative, double e_min) {
  if (!value || !derivative) throw ValidationError("CountingFunction: empty function");
  CountingFunction c;
  c.e_min_ = e_min;
  c.jump_at_min_ = value(std::nextafter(e_min, INFINITY));
  c.value_ = std::move(value);
  c.derivative_ = std::move(derivative);
  return c;
}

CountingFunction CountingFunction::sampled(std::vector<double> E, std::vector<double> W) {
  if (E.size() != W.size() || E.size() < 2)
    throw ValidationError("CountingFunction: need at least two (E, W) samples of equal length");
  for (std::size_t i = 0; i < E.size(); ++i)
    if (!std::isfinite(E[i]) || !std::isfinite(W[i]))
      throw ValidationError("CountingFunction: non-finite sample");
  for (std::size_t i = 1; i < E.size(); ++i) {
    if (!(E[i] > E[i - 1])) throw ValidationError("CountingFunction: E must be strictly increasing");
    if (W[i] < W[i - 1]) throw ValidationError("CountingFunction: W must be nondecreasing");
  }
  CountingFunction c;
  c.e_min_ = E.front();
  c.jump_at_min_ = W.front();
  c.E_ = std::move(E);
  c.W_ = std::move(W);
  return c;
}

CountingFunction CountingFunction::plus_log(double coef) const {
  if (is_sampled()) throw ValidationError("CountingFunction::plus_log: analytic functions only");
  CountingFunction c = *this;
  auto v = value_;
  auto d = derivative_;
  c.value_ = [v, coef](double E) { return v(E) + (E >= 1.0 ? coef * std::log(E) : 0.0); };
  c.derivative_ = [d, coef](double E) { return d(E) + (E > 1.0 ? coef / E : 0.0); };
  if (e_min_ < 1.0) c.kinks_.push_back(1.0);
  return c;
}

double CountingFunction::value(double E) const {
  if (E <= e_min_) return 0.0;
  if (!is_sampled()) return value_(E);
  if (E > E_.back()) throw DomainError("CountingFunction: E beyond the sampled range");
  const auto it = std::lower_bound(E_.begin(), E_.end(), E);
  const std::size_t j = static_cast<std::size_t>(it - E_.begin());
  const std::size_t i = j - 1;
  return W_[i] + (W_[j] - W_[i]) * (E - E_[i]) / (E_[j] - E_[i]);
}

double CountingFunction::derivative(double E) const {
  if (E <= e_min_) return 0.0;
  if (!is_sampled()) return derivative_(E);
  if (E > E_.back()) throw DomainError("CountingFunction: E beyond the sampled range");
  const auto it = std::lower_bound(E_.begin(), E_.end(), E);
  const std::size_t j = static_cast<std::size_t>(it - E_.begin());
  const std::size_t i = j - 1;
  return (W_[j] - W_[i]) / (E_[j] - E_[i]);
}

// ----------------------------------------------------------------- Weyl action

double weyl_action(const WidthFunction& width, double E) {
  if (!std::isfinite(E)) throw DomainError("weyl_action: non-finite E");
  if (E <= width.v_min()) return 0.0;
  if (width.kind() == WidthFunction::Kind::ExpQuadratic) {
    if (width.beta() == 0.0 && width.gamma() == 0.0) {
      const double q = std::sqrt(1.0 - kFourPi2 / E);
      return 2.0 * std::sqrt(E) * (std::atanh(q) - q);
    }
    const double wE = width.width(E);
    auto f = [&](double w) { return std::sqrt(std::max(0.0, E - width.height(w))); };
    return 2.0 * quad::tanh_sinh(f, 0.0, wE, 1e-13, 1e-300).value;
  }

  const auto& v = width.v_samples();
  const auto& w = width.w_samples();
  double sum = w.front() * std::sqrt(E - v.front());
  for (std::size_t i = 0; i + 1 < v.size() && v[i] < E; ++i) {
    const double dw = w[i + 1] - w[i];
    if (v[i + 1] == v[i]) {
      sum += dw * std::sqrt(E - v[i]);
      continue;
    }
    const double slope = dw / (v[i + 1] - v[i]);
    const double hi = std::min(v[i + 1], E);
    sum += slope * (2.0 / 3.0) * (std::pow(E - v[i], 1.5) - std::pow(E - hi, 1.5));
  }
  if (E > v.back() && width.tail_log_coefficient() > 0.0)
    sum += width.tail_log_coefficient() * log_tail_action(v.back(), E);
  return 2.0 * sum;
}

// --------------------------------------------------------------- Abel inverse

namespace {

double abel_sampled(const std::vector<double>& E, const std::vector<double>& W, double v) {
  double sum = W.front() / std::sqrt(v - E.front());
  for (std::size_t i = 0; i + 1 < E.size() && E[i] < v; ++i) {
    const double slope = (W[i + 1] - W[i]) / (E[i + 1] - E[i]);
    const double hi = std::min(E[i + 1], v);
    sum += slope * 2.0 * (std::sqrt(v - E[i]) - std::sqrt(v - hi));
  }
  return sum / kPi;
}

}  // namespace

double abel_invert(const CountingFunction& counting, double v, double rel_tol) {
  if (!std::isfinite(v)) throw DomainError("abel_invert: non-finite v");
  const double e0 = counting.e_min();
  if (v <= e0) return 0.0;

  if (!counting.is_sampled()) {
    const double span = v - e0;
    const double root = std::sqrt(span);
    auto f = [&](double theta) {
      const double s = std::sin(theta);
      return counting.derivative(e0 + span * s * s) * 2.0 * root * s;
    };
    std::vector<double> cuts{0.0};
    for (double k : counting.kinks())
      if (k > e0 && k < v) cuts.push_back(std::asin(std::sqrt((k - e0) / span)));
    std::sort(cuts.begin(), cuts.end());
    cuts.push_back(0.5 * kPi);
    double sum = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
      sum += quad::tanh_sinh(f, cuts[i], cuts[i + 1], 1e-13, 1e-12).value;
    const double atom = counting.value(std::nextafter(e0, INFINITY));
    return (sum + atom / root) / kPi;
  }

  const auto& E = counting.E_samples();
  const auto& W = counting.W_samples();
  if (v > E.back()) throw DomainError("abel_invert: v beyond the sampled range of W");
  const auto below = static_cast<std::size_t>(std::lower_bound(E.begin(), E.end(), v) - E.begin());
  if (below < 5)
    throw ConvergenceError("abel_invert: fewer than 5 samples below v", INFINITY);
  const double full = abel_sampled(E, W, v);
  // Same sum on every other sample (endpoints kept) estimates the error.
  std::vector<double> Eh, Wh;
  for (std::size_t i = 0; i < E.size(); i += 2) {
    Eh.push_back(E[i]);
    Wh.push_back(W[i]);
  }
  if (Eh.back() != E.back()) {
    Eh.push_back(E.back());
    Wh.push_back(W.back());
  }
  const double err = std::abs(full - abel_sampled(Eh, Wh, v)) / 3.0;
  if (err > rel_tol * std::max(1.0, std::abs(full)))
    throw ConvergenceError("abel_invert: grid too coarse near E = v", err);
  return full;
}

// ------------------------------------------------------------- imaginary time

double imaginary_time(const WidthFunction& width, double E) {
  if (!std::isfinite(E)) throw DomainError("imaginary_time: non-finite E");
  if (E >= width.v_min()) throw DomainError("imaginary_time: E must lie below the potential");

  if (width.kind() == WidthFunction::Kind::ExpQuadratic) {
    const double beta = width.beta();
    const double a = width.gamma() - E;
    const double ra = std::sqrt(a);
    const double num = 2.0 * ra * std::sqrt(a + kFourPi2 - beta) + 2.0 * a - beta;
    const double den = 4.0 * kPi * ra - beta;
    if (!(num / den > 0.0)) throw DomainError("imaginary_time: closed form outside its range");
    return std::log(num / den) / (2.0 * ra);
  }

  const auto& v = width.v_samples();
  const auto& w = width.w_samples();
  double sum = 0.5 * w.front() / std::sqrt(v.front() - E);
  for (std::size_t i = 0; i + 1 < v.size(); ++i) {
    const double dw = w[i + 1] - w[i];
    if (v[i + 1] == v[i]) {
      sum += 0.5 * dw / std::sqrt(v[i] - E);
      continue;
    }
    const double slope = dw / (v[i + 1] - v[i]);
    sum += slope * (std::sqrt(v[i + 1] - E) - std::sqrt(v[i] - E));
  }
  if (width.tail_log_coefficient() > 0.0)
    sum += 0.5 * width.tail_log_coefficient() * log_tail_time(v.back(), E);
  return sum;
}

double imaginary_time_quadrature(const WidthFunction& width, double E) {
  if (width.kind() != WidthFunction::Kind::ExpQuadratic)
    throw ValidationError("imaginary_time_quadrature: exp_quadratic widths only");
  if (E >= width.v_min()) throw DomainError("imaginary_time: E must lie below the potential");
  auto f = [&](double w) { return 0.5 / std::sqrt(width.height(w) - E); };
  return quad::exp_sinh(f, 0.0, 1e-14, 1e-300).value;
}

double imaginary_time_expansion(double E, double kappa) {
  if (!(E < 0.0)) throw DomainError("imaginary_time_expansion: E must be negative");
  const double s = std::sqrt(-E);
  return std::log(s / kPi) / (2.0 * s) - kappa / (2.0 * E);
}

double fit_beta(double target_kappa) {
  if (!std::isfinite(target_kappa) || target_kappa < 0.0)
    throw ValidationError("fit_beta: kappa must be a finite non-negative number");
  const double beta = 4.0 * kPi * target_kappa;
  const auto width = WidthFunction::exp_quadratic(beta, 0.0);  // validates beta <= 8 pi^2
  // The matched beta leaves a residual of order (-E)^{-3/2} log(-E); any
  // other beta leaves (beta/(4 pi) - kappa)/(2|E|).
  const double E = -1e6;
  const double resid = imaginary_time(width, E) - imaginary_time_expansion(E, target_kappa);
  if (std::abs(resid * E) > 1e-2)
    throw ValidationError("fit_beta: T(E) does not match its expansion at the fitted beta");
  return beta;
}

// ----------------------------------------------------------------- asymptotics

double riemann_count(double Omega, bool smoothed) {
  if (!(Omega > 0.0)) throw DomainError("riemann_count: Omega must be positive");
  const double n = Omega / kTwoPi * std::log(Omega / (kTwoPi * std::exp(1.0)));
  return smoothed ? n + 7.0 / 8.0 : n;
}

double xi_logderiv_asymptotic(double E) {
  if (!(E < 0.0)) throw DomainError("xi_logderiv_asymptotic: E must be negative");
  const double s = std::sqrt(-E);
  return -std::log(s / kPi) / (2.0 * s) + 7.0 / (8.0 * E);
}

double whittaker_logderiv_asymptotic(double E, double gamma) {
  if (!(E < 0.0)) throw DomainError("whittaker_logderiv_asymptotic: E must be negative");
  const double s = std::sqrt(-E);
  return xi_logderiv_asymptotic(E) + gamma / (4.0 * s * s * s) * std::log(s / (kPi * std::exp(1.0)));
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw ValidationError("loglog_slope: need >= 2 points");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double lx = std::log(x[i]);
    const double ly = std::log(std::abs(y[i]));
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace xispec
