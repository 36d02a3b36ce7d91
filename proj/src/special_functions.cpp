#include "xispec/special_functions.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>

#include <boost/math/special_functions/bernoulli.hpp>

#include "xispec/linear_ode.hpp"
#include "xispec/quadrature.hpp"

namespace xispec {

namespace {

constexpr Complex kI{0.0, 1.0};
const double kLogPi = std::log(kPi);
const double kLogMaxDouble = std::log(std::numeric_limits<double>::max());

// exp(-pi n^2 x) terms are dropped once they fall this far below the sum.
constexpr double kSeriesRelCut = 1e-3;

double log_cosh(double x) {
  const double a = std::abs(x);
  return a + std::log1p(std::exp(-2.0 * a)) - std::log(2.0);
}

}  // namespace

void QuadratureConfig::validate() const {
  if (!(truncation_t > 0.0)) throw ValidationError("QuadratureConfig: truncation_t must be > 0");
  if (series_cutoff < 1) throw ValidationError("QuadratureConfig: series_cutoff must be >= 1");
  if (!(abs_tol > 0.0) || !(rel_tol > 0.0))
    throw ValidationError("QuadratureConfig: tolerances must be > 0");
}

// ---------------------------------------------------------------- theta / Phi

double jacobi_psi(double x, const QuadratureConfig& cfg) {
  cfg.validate();
  if (!(x > 0.0) || !std::isfinite(x)) throw DomainError("jacobi_psi: x must be positive");
  // Below this x the direct series would need more than series_cutoff terms;
  // use theta(x) = x^{-1/2} theta(1/x) instead.
  const double direct_min = 40.0 / (kPi * cfg.series_cutoff * cfg.series_cutoff);
  if (x < direct_min) {
    const double theta_inv = 1.0 + 2.0 * jacobi_psi(1.0 / x, cfg);
    return 0.5 * (theta_inv / std::sqrt(x) - 1.0);
  }
  double sum = 0.0;
  for (int n = 1; n <= cfg.series_cutoff; ++n) {
    const double term = std::exp(-kPi * n * n * x);
    sum += term;
    if (term < kSeriesRelCut * cfg.abs_tol * sum) break;
  }
  return sum;
}

double jacobi_theta(double x, const QuadratureConfig& cfg) { return 1.0 + 2.0 * jacobi_psi(x, cfg); }

double phi(double t, const QuadratureConfig& cfg) {
  cfg.validate();
  if (!std::isfinite(t)) throw DomainError("phi: t must be finite");
  t = std::abs(t);
  const double max_safe_t = 0.5 * kLogMaxDouble;
  if (t > max_safe_t)
    throw RangeError("phi: e^{2t} overflows; largest safe t is " + std::to_string(max_safe_t));
  const double e2t = std::exp(2.0 * t);
  double sum = 0.0;
  for (int n = 1; n <= cfg.series_cutoff; ++n) {
    const double n2 = static_cast<double>(n) * n;
    const double gauss = kPi * n2 * e2t;
    // Both terms share exp(-pi n^2 e^{2t}); once its log drops below the
    // underflow threshold every later term does too.
    const double log_a = std::log(4.0 * kPi * kPi * n2 * n2) + 4.5 * t - gauss;
    const double log_b = std::log(6.0 * kPi * n2) + 2.5 * t - gauss;
    if (log_a < -745.0) break;
    const double term = std::exp(log_a) - std::exp(log_b);
    sum += term;
    if (std::abs(term) < kSeriesRelCut * cfg.abs_tol * std::abs(sum)) break;
  }
  return sum;
}

// ---------------------------------------------------------------------- Gamma

Complex log_gamma(Complex z) {
  if (!is_finite(z)) throw DomainError("log_gamma: non-finite argument");
  if (z.imag() == 0.0 && z.real() <= 0.0 && z.real() == std::floor(z.real()))
    throw DomainError("log_gamma: pole at non-positive integer");

  Complex shift_log{0.0, 0.0};
  double need = 0.0;
  if (std::abs(z.imag()) < 15.0 && z.real() < 15.0)
    need = std::ceil(15.0 - z.real());
  else if (z.real() < 0.0)
    need = std::ceil(-z.real());
  if (need > 1e5) throw RangeError("log_gamma: argument too far into the left half plane");
  for (int k = 0; k < static_cast<int>(need); ++k) shift_log += std::log(z + static_cast<double>(k));
  z += need;

  // Stirling series; |z| >= 15 so ten Bernoulli terms reach double precision.
  static const std::array<double, 10> kCoef = [] {
    std::array<double, 10> c{};
    for (int k = 1; k <= 10; ++k)
      c[k - 1] = boost::math::bernoulli_b2n<double>(k) / (2.0 * k * (2.0 * k - 1.0));
    return c;
  }();
  const Complex inv = 1.0 / z;
  const Complex inv2 = inv * inv;
  Complex series{0.0, 0.0};
  Complex p = inv;
  for (double c : kCoef) {
    series += c * p;
    p *= inv2;
  }
  const Complex lg = (z - 0.5) * std::log(z) - z + 0.5 * std::log(kTwoPi) + series;
  return lg - shift_log;
}

Complex digamma(Complex z) {
  if (!is_finite(z)) throw DomainError("digamma: non-finite argument");
  if (z.imag() == 0.0 && z.real() <= 0.0 && z.real() == std::floor(z.real()))
    throw DomainError("digamma: pole at non-positive integer");
  Complex acc{0.0, 0.0};
  double need = 0.0;
  if (std::abs(z.imag()) < 15.0 && z.real() < 15.0)
    need = std::ceil(15.0 - z.real());
  else if (z.real() < 0.0)
    need = std::ceil(-z.real());
  if (need > 1e5) throw RangeError("digamma: argument too far into the left half plane");
  for (int k = 0; k < static_cast<int>(need); ++k) acc -= 1.0 / (z + static_cast<double>(k));
  z += need;
  const Complex inv = 1.0 / z;
  const Complex inv2 = inv * inv;
  Complex series{0.0, 0.0};
  Complex p = inv2;
  for (int k = 1; k <= 10; ++k) {
    series += boost::math::bernoulli_b2n<double>(k) / (2.0 * k) * p;
    p *= inv2;
  }
  return acc + std::log(z) - 0.5 * inv - series;
}

// ----------------------------------------------------------------------- zeta

namespace {

// Returns (s-1) zeta(s) if times_sm1, else zeta(s).
Complex euler_maclaurin(Complex s, int terms, bool times_sm1) {
  const Complex sm1 = s - 1.0;
  if (s.real() >= 40.0) {
    // Direct Dirichlet series; 2^{-40} already sits at 1e-12 and the tail
    // shrinks geometrically.
    Complex sum{1.0, 0.0};
    for (int n = 2; n < 100000; ++n) {
      const Complex term = std::exp(-s * std::log(static_cast<double>(n)));
      sum += term;
      if (std::abs(term) < 1e-18 * std::abs(sum)) break;
    }
    return times_sm1 ? sm1 * sum : sum;
  }

  const double abs_s = std::abs(s);
  const int N = std::max(10, static_cast<int>(std::ceil(1.5 * (abs_s + 2.0 * terms) / kPi)));
  Complex head{0.0, 0.0};
  for (int n = 1; n < N; ++n) head += std::exp(-s * std::log(static_cast<double>(n)));

  const double logN = std::log(static_cast<double>(N));
  const Complex N_ms = std::exp(-s * logN);
  Complex tail = 0.5 * N_ms;
  // B_{2k}/(2k)! s(s+1)...(s+2k-2) N^{-s-2k+1}
  Complex rising = s;                        // s(s+1)...(s+2k-2) at k = 1
  Complex power = N_ms / static_cast<double>(N);  // N^{-s-1}
  double factorial = 2.0;                    // (2k)!
  for (int k = 1; k <= terms; ++k) {
    tail += boost::math::bernoulli_b2n<double>(k) / factorial * rising * power;
    rising *= (s + (2.0 * k - 1.0)) * (s + 2.0 * k);
    power /= static_cast<double>(N) * static_cast<double>(N);
    factorial *= (2.0 * k + 1.0) * (2.0 * k + 2.0);
  }
  const Complex N_1ms = N_ms * static_cast<double>(N);
  if (times_sm1) return sm1 * (head + tail) + N_1ms;
  return head + tail + N_1ms / sm1;
}

}  // namespace

Complex zeta(Complex s, const ZetaConfig& cfg) {
  if (s == Complex{1.0, 0.0}) throw DomainError("zeta: pole at s = 1");
  if (std::abs(s.imag()) > cfg.max_abs_omega)
    throw RangeError("zeta: |Im s| exceeds configured maximum " + std::to_string(cfg.max_abs_omega));
  return euler_maclaurin(s, cfg.bernoulli_terms, false);
}

Complex zeta_times_sm1(Complex s, const ZetaConfig& cfg) {
  if (std::abs(s.imag()) > cfg.max_abs_omega)
    throw RangeError("zeta: |Im s| exceeds configured maximum " + std::to_string(cfg.max_abs_omega));
  return euler_maclaurin(s, cfg.bernoulli_terms, true);
}

Complex zeta_critical(double omega, const ZetaConfig& cfg) {
  if (!std::isfinite(omega)) throw DomainError("zeta_critical: non-finite omega");
  if (std::abs(omega) > cfg.max_abs_omega)
    throw RangeError("zeta_critical: |omega| exceeds configured maximum " +
                     std::to_string(cfg.max_abs_omega));
  // Schwarz reflection keeps zeta(1/2 - i w) = conj zeta(1/2 + i w) exact.
  const Complex z = euler_maclaurin({0.5, std::abs(omega)}, cfg.bernoulli_terms, false);
  return omega < 0.0 ? std::conj(z) : z;
}

// ------------------------------------------------------------------------- xi

namespace {

// Representative of {omega, -omega} with Re(1/2 + i omega) >= 1/2.
Complex canonical_even(Complex omega) {
  if (omega.imag() > 0.0 || (omega.imag() == 0.0 && omega.real() < 0.0)) return -omega;
  return omega;
}

}  // namespace

Complex log_xi_zeta(Complex omega, const ZetaConfig& cfg) {
  if (!is_finite(omega)) throw DomainError("xi_zeta: non-finite omega");
  omega = canonical_even(omega);
  const Complex s = 0.5 + kI * omega;
  // xi = -(w^2 + 1/4)/2 Gamma(1/4 + iw/2) pi^{-1/4 - iw/2} zeta(s)
  //    = Gamma(5/4 + iw/2) pi^{-1/4 - iw/2} (s - 1) zeta(s).
  const Complex a = 0.25 + 0.5 * kI * omega;
  const Complex zs = zeta_times_sm1(s, cfg);
  if (zs == Complex{0.0, 0.0}) return {-std::numeric_limits<double>::infinity(), 0.0};
  return log_gamma(a + 1.0) - a * kLogPi + std::log(zs);
}

Complex xi_zeta(Complex omega, const ZetaConfig& cfg) {
  const Complex lx = log_xi_zeta(omega, cfg);
  if (std::isinf(lx.real()) && lx.real() < 0) return {0.0, 0.0};
  if (lx.real() > kLogMaxDouble)
    throw RangeError("xi_zeta: value overflows (log|xi| = " + std::to_string(lx.real()) + ")");
  Complex v = std::exp(lx);
  // Real on the real axis.
  if (omega.imag() == 0.0) v = {v.real(), 0.0};
  return v;
}

double scaled_xi(double omega, const ZetaConfig& cfg) {
  const Complex lx = log_xi_zeta({omega, 0.0}, cfg);
  if (std::isinf(lx.real())) return 0.0;
  return std::exp(lx.real() + log_scaling_S(omega)) * std::cos(lx.imag());
}

namespace {

// Phi(t) for complex t with Re t >= 0 and |Im t| < pi/4.
Complex phi_complex(Complex t, int cutoff) {
  const Complex e2t = std::exp(2.0 * t);
  Complex sum{0.0, 0.0};
  for (int n = 1; n <= cutoff; ++n) {
    const double n2 = static_cast<double>(n) * n;
    const Complex gauss = -kPi * n2 * e2t;
    if (gauss.real() < -745.0) break;
    sum += (4.0 * kPi * kPi * n2 * n2 * std::exp(4.5 * t + gauss) -
            6.0 * kPi * n2 * std::exp(2.5 * t + gauss));
  }
  return sum;
}

// Contour height for the Fourier integral. Phi is analytic for |Im t| < pi/4
// and xi decays like e^{-pi w/4}; on Im t = pi/4 - 0.08 the integrand is
// within a factor ~100 of the result instead of ~e^{pi w/4}.
constexpr double kContourGap = 0.08;

}  // namespace

Complex xi_fourier(Complex omega, const QuadratureConfig& cfg) {
  cfg.validate();
  if (!is_finite(omega)) throw DomainError("xi_fourier: non-finite omega");
  // Even in omega; pick one representative so xi(w) == xi(-w) bit for bit.
  if (omega.real() < 0.0 || (omega.real() == 0.0 && omega.imag() < 0.0)) omega = -omega;

  // xi = int_R e^{i w t} Phi(t) dt. Shifting t -> t + iy and folding t < 0
  // onto t > 0 with Phi even gives
  //   xi = e^{-w y} int_0^T [e^{iwt} Phi(t + iy) + e^{-iwt} Phi(t - iy)] dt,
  // which is 2 int_0^T cos(wt) Phi(t) dt at y = 0.
  const double y = omega.real() > 1.0 ? 0.25 * kPi - kContourGap : 0.0;
  const int cutoff = std::max(cfg.series_cutoff, 60);
  const bool real_axis = omega.imag() == 0.0;
  auto integrand = [&](double t) {
    const Complex e = std::exp(kI * omega * t);
    const Complex up = e * phi_complex({t, y}, cutoff);
    if (real_axis) return Complex{2.0 * up.real(), 0.0};
    return up + phi_complex({t, -y}, cutoff) / e;
  };

  const double T = cfg.truncation_t;
  const double tail = std::abs(integrand(T));
  if (tail > cfg.abs_tol)
    throw ConvergenceError("xi_fourier: truncation_t too small for the requested abs_tol", tail);

  // Fixed Gauss-Kronrod panels; the panel count doubles until two successive
  // sums agree. The integrand is analytic, so agreement means convergence.
  auto panel_sum = [&](int panels) {
    Complex total{0.0, 0.0};
    for (int p = 0; p < panels; ++p) {
      const double a = T * p / panels;
      const double b = T * (p + 1) / panels;
      const double re = quad::gauss_kronrod([&](double t) { return integrand(t).real(); }, a, b,
                                            1.0, 0.0, 0, false).value;
      double im = 0.0;
      if (!real_axis)
        im = quad::gauss_kronrod([&](double t) { return integrand(t).imag(); }, a, b, 1.0, 0.0, 0,
                                 false).value;
      total += Complex{re, im};
    }
    return total;
  };
  const Complex shift = std::exp(-omega * y);
  int panels = std::max(4, static_cast<int>(std::ceil(std::abs(omega.real()) * T / 10.0)));
  Complex coarse = panel_sum(panels);
  Complex total = coarse;
  double achieved = 0.0;
  for (int round = 0; round < 6; ++round) {
    panels *= 2;
    total = panel_sum(panels);
    achieved = std::abs(total - coarse) * std::abs(shift);
    if (achieved <= std::max(cfg.abs_tol, cfg.rel_tol * std::abs(shift * total))) break;
    coarse = total;
  }
  if (achieved > std::max(cfg.abs_tol, cfg.rel_tol * std::abs(shift * total)))
    throw ConvergenceError("xi_fourier: tolerance not achieved", achieved);
  Complex out = shift * total;
  if (real_axis) out = {out.real(), 0.0};
  return out;
}

// ------------------------------------------------------------------- f, Z, S

double log_prefactor_f(double omega) {
  return std::log(0.5 * (omega * omega + 0.25)) - 0.25 * kLogPi +
         log_gamma({0.25, 0.5 * omega}).real();
}

double prefactor_f(double omega) { return std::exp(log_prefactor_f(omega)); }

double siegel_theta(double omega) {
  return log_gamma({0.25, 0.5 * omega}).imag() - 0.5 * omega * kLogPi;
}

double big_Z(double omega, const ZetaConfig& cfg) {
  const Complex z = zeta_critical(omega, cfg);
  return (std::polar(1.0, siegel_theta(omega)) * z).real();
}

double log_scaling_S(double omega) {
  return 1.5 * std::log(2.0) + log_cosh(kPi * omega / 4.0) - 0.25 * kLogPi -
         0.875 * std::log(omega * omega + 4.0);
}

double scaling_S(double omega) { return std::exp(log_scaling_S(omega)); }

// ------------------------------------------------------------------- Bessel K

Scaled<Complex> bessel_K_scaled(Complex nu, double z) {
  if (!(z > 0.0) || !std::isfinite(z)) throw DomainError("bessel_K: z must be positive");
  if (!is_finite(nu)) throw DomainError("bessel_K: non-finite order");

  // Even in nu, and K_{conj nu}(z) = conj K_nu(z) for real z.
  if (nu.real() < 0.0 || (nu.real() == 0.0 && nu.imag() < 0.0)) nu = -nu;
  bool conjugate = false;
  if (nu.imag() < 0.0) {
    nu = std::conj(nu);
    conjugate = true;
  }
  const double sigma = nu.real();
  const double tau = nu.imag();

  // Contour Im t = alpha. For large tau the shift towards pi/2 removes the
  // e^{pi tau/2} cancellation; 1/tau is left as decay margin.
  const double alpha = tau > 2.0 / kPi ? 0.5 * kPi - 1.0 / tau : 0.0;
  const double ca = std::cos(alpha);
  const double sa = std::sin(alpha);
  const double strip = alpha > 0.0 ? 0.5 * (0.5 * kPi - alpha) : 0.25 * kPi;
  const double h = kTwoPi * strip / (41.0 + tau * strip);

  auto exponent = [&](double u) {
    const Complex t{u, alpha};
    return nu * t - z * Complex{std::cosh(u) * ca, std::sinh(u) * sa};
  };
  const double u_peak = std::asinh(sigma / (z * ca));
  const double log_peak = exponent(u_peak).real();
  if (!std::isfinite(log_peak)) throw RangeError("bessel_K: integrand not representable");

  constexpr double kDrop = 41.0;  // relative cut e^{-41} ~ 1.6e-18
  constexpr long kMaxNodes = 50'000'000;
  Complex sum = std::exp(exponent(u_peak) - log_peak);
  long nodes = 1;
  for (int dir : {-1, 1}) {
    for (long k = 1;; ++k) {
      const Complex e = exponent(u_peak + dir * k * h) - log_peak;
      if (e.real() < -kDrop) break;
      sum += std::exp(e);
      if (++nodes > kMaxNodes) throw RangeError("bessel_K: integrand decays too slowly");
    }
  }
  Scaled<Complex> out{0.5 * h * sum, log_peak};
  if (conjugate) out.mantissa = std::conj(out.mantissa);
  if (sigma == 0.0) out.mantissa = {out.mantissa.real(), 0.0};
  return out;
}

Complex bessel_K(Complex nu, double z) {
  const auto s = bessel_K_scaled(nu, z);
  return s.value();
}

Complex bessel_K_derivative(Complex nu, double z) {
  return -0.5 * (bessel_K(nu - 1.0, z) + bessel_K(nu + 1.0, z));
}

double polya_fake_xi(double omega, int order) {
  if (order != 1 && order != 2) throw ValidationError("polya_fake_xi: order must be 1 or 2");
  const double z = kTwoPi;
  const Complex half{0.0, 0.5 * omega};
  double v = 4.0 * kPi * kPi * (bessel_K(half + 2.25, z) + bessel_K(half - 2.25, z)).real();
  if (order == 2) v -= 6.0 * kPi * (bessel_K(half + 1.25, z) + bessel_K(half - 1.25, z)).real();
  return v;
}

// ----------------------------------------------------------------- Whittaker

namespace {

struct SeriesSeed {
  Complex value;
  Complex derivative;
  double log_scale;
};

// W ~ e^{-z/2} z^kappa sum_s (1/2+mu-kappa)_s (1/2-mu-kappa)_s / s! (-z)^{-s}
SeriesSeed whittaker_seed(double kappa, Complex mu2, double z0, const WhittakerConfig& cfg) {
  Complex term{1.0, 0.0};
  Complex sum = term;
  Complex dsum = term * (-0.5 + kappa / z0);
  double last = 1.0;
  bool converged = false;
  for (int s = 1; s <= cfg.max_series_terms; ++s) {
    const double a = 0.5 - kappa + (s - 1);
    term *= (a * a - mu2) / (static_cast<double>(s) * -z0);
    const double mag = std::abs(term);
    sum += term;
    dsum += term * (-0.5 + (kappa - s) / z0);
    if (mag == 0.0 || mag < cfg.series_tol * std::abs(sum)) {
      converged = true;
      break;
    }
    if (mag > last && s > 2) break;  // asymptotic series started to diverge
    last = mag;
  }
  if (!converged)
    throw ConvergenceError("whittaker_W: seed point z0 = " + std::to_string(z0) +
                               " too small for the asymptotic series",
                           last);
  return {sum, dsum, -0.5 * z0 + kappa * std::log(z0)};
}

template <class Scalar>
std::vector<WhittakerSample> whittaker_sweep(double kappa, Complex mu2,
                                             const std::vector<double>& zs_desc, double z0,
                                             const WhittakerConfig& cfg) {
  const SeriesSeed seed = whittaker_seed(kappa, mu2, z0, cfg);
  const Scalar m2 = ScalarTraits<Scalar>::from_complex(mu2);
  auto q = [kappa, m2](double z) -> Scalar {
    return Scalar(0.25 - kappa / z) + (m2 - 0.25) / (z * z);
  };
  ode::LinearState<Scalar> init{z0, ScalarTraits<Scalar>::from_complex(seed.value),
                                ScalarTraits<Scalar>::from_complex(seed.derivative),
                                seed.log_scale};
  ode::Options opt;
  opt.rel_tol = cfg.rel_tol;
  opt.abs_tol = cfg.abs_tol * 1e-300;
  opt.initial_step = -0.01;
  const auto states = ode::integrate<Scalar>(q, init, std::span<const double>(zs_desc), opt);
  std::vector<WhittakerSample> out;
  out.reserve(states.size());
  for (const auto& st : states)
    out.push_back({st.x, {Complex(st.u), st.log_scale}, {Complex(st.du), st.log_scale}});
  return out;
}

}  // namespace

std::vector<WhittakerSample> whittaker_W_profile(double kappa, Complex mu, std::vector<double> zs,
                                                 const WhittakerConfig& cfg) {
  if (!std::isfinite(kappa) || !is_finite(mu)) throw DomainError("whittaker_W: non-finite parameter");
  for (double z : zs)
    if (!(z > 0.0) || !std::isfinite(z)) throw DomainError("whittaker_W: z must be positive");
  if (zs.empty()) return {};

  std::vector<std::size_t> order(zs.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return zs[a] > zs[b]; });
  std::vector<double> desc(zs.size());
  for (std::size_t i = 0; i < order.size(); ++i) desc[i] = zs[order[i]];

  const Complex mu2 = mu * mu;
  double z0 = cfg.seed_override > 0.0 ? cfg.seed_override
                                       : std::max(cfg.min_seed, cfg.seed_factor * std::norm(mu));
  z0 = std::max(z0, desc.front());

  // Without an override the seed point moves outward until the asymptotic
  // series reaches series_tol; for kappa < 0 the default is often too close.
  if (cfg.seed_override <= 0.0) {
    for (int tries = 0; tries < 40; ++tries) {
      try {
        (void)whittaker_seed(kappa, mu2, z0, cfg);
        break;
      } catch (const ConvergenceError&) {
        z0 *= 1.5;
      }
    }
  }

  std::vector<WhittakerSample> sorted =
      mu2.imag() == 0.0 ? whittaker_sweep<double>(kappa, mu2, desc, z0, cfg)
                        : whittaker_sweep<Complex>(kappa, mu2, desc, z0, cfg);
  std::vector<WhittakerSample> out(zs.size());
  for (std::size_t i = 0; i < order.size(); ++i) out[order[i]] = sorted[i];
  return out;
}

Scaled<Complex> whittaker_W_scaled(double kappa, Complex mu, double z, const WhittakerConfig& cfg) {
  return whittaker_W_profile(kappa, mu, {z}, cfg).front().value;
}

Complex whittaker_W(double kappa, Complex mu, double z, const WhittakerConfig& cfg) {
  return whittaker_W_scaled(kappa, mu, z, cfg).value();
}

}  // namespace xispec
