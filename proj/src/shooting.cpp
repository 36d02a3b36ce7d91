#include "xispec/shooting.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <boost/math/tools/minima.hpp>
#include <boost/math/tools/roots.hpp>

#include "xispec/quadrature.hpp"

namespace xispec {

namespace {

const double kFourPi2 = 4.0 * kPi * kPi;

double sgn(double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }

// Root of g on [a, b] with g(a), g(b) of opposite signs.
template <class G>
double bisect_root(G&& g, double a, double b) {
  auto tol = [](double lo, double hi) {
    return std::abs(hi - lo) <= 4.0 * std::numeric_limits<double>::epsilon() *
                                     std::max(1.0, std::min(std::abs(lo), std::abs(hi)));
  };
  try {
    const auto r = boost::math::tools::bisect(g, a, b, tol);
    return 0.5 * (r.first + r.second);
  } catch (const std::exception& e) {
    throw EvaluationError(std::string("bisection: ") + e.what());
  }
}

}  // namespace

// ------------------------------------------------------------- PotentialSpec

PotentialSpec PotentialSpec::exp_one_sided() {
  PotentialSpec p;
  p.sidedness_ = Sidedness::one;
  p.tag_ = PotentialTag::exp_one_sided;
  p.V_ = [](double x) { return kFourPi2 * std::exp(2.0 * x); };
  p.dV_ = [](double x) { return 2.0 * kFourPi2 * std::exp(2.0 * x); };
  p.d2V_ = [](double x) { return 4.0 * kFourPi2 * std::exp(2.0 * x); };
  return p;
}

PotentialSpec PotentialSpec::morse(double kappa, double gamma) {
  if (!std::isfinite(kappa) || !std::isfinite(gamma))
    throw ValidationError("morse: non-finite parameter");
  PotentialSpec p;
  p.sidedness_ = Sidedness::one;
  p.tag_ = PotentialTag::morse;
  p.kappa_ = kappa;
  p.gamma_ = gamma;
  const double b = 4.0 * kPi * kappa;
  p.V_ = [b, gamma](double x) {
    const double e = std::exp(x);
    return e * (kFourPi2 * e - b) + gamma;
  };
  p.dV_ = [b](double x) {
    const double e = std::exp(x);
    return e * (2.0 * kFourPi2 * e - b);
  };
  p.d2V_ = [b](double x) {
    const double e = std::exp(x);
    return e * (4.0 * kFourPi2 * e - b);
  };
  return p;
}

PotentialSpec PotentialSpec::exp_two_sided() {
  PotentialSpec p;
  p.sidedness_ = Sidedness::two;
  p.tag_ = PotentialTag::exp_two_sided;
  p.V_ = [](double x) { return kFourPi2 * std::exp(4.0 * std::abs(x)); };
  p.dV_ = [](double x) { return 4.0 * sgn(x) * kFourPi2 * std::exp(4.0 * std::abs(x)); };
  p.d2V_ = [](double x) { return 16.0 * kFourPi2 * std::exp(4.0 * std::abs(x)); };
  p.kinks_ = {0.0};
  return p;
}

PotentialSpec PotentialSpec::cosh() {
  PotentialSpec p;
  p.sidedness_ = Sidedness::two;
  p.tag_ = PotentialTag::cosh;
  p.V_ = [](double x) { return 2.0 * kFourPi2 * std::cosh(4.0 * x); };
  p.dV_ = [](double x) { return 8.0 * kFourPi2 * std::sinh(4.0 * x); };
  p.d2V_ = [](double x) { return 32.0 * kFourPi2 * std::cosh(4.0 * x); };
  return p;
}

PotentialSpec PotentialSpec::tzitzeica() {
  PotentialSpec p;
  p.sidedness_ = Sidedness::two;
  p.tag_ = PotentialTag::tzitzeica;
  const double c = kFourPi2 * std::pow(2.0, -2.0 / 3.0);
  p.V_ = [c](double x) { return c * (2.0 * std::exp(3.0 * x) + std::exp(-6.0 * x)); };
  p.dV_ = [c](double x) { return c * (6.0 * std::exp(3.0 * x) - 6.0 * std::exp(-6.0 * x)); };
  p.d2V_ = [c](double x) { return c * (18.0 * std::exp(3.0 * x) + 36.0 * std::exp(-6.0 * x)); };
  return p;
}

PotentialSpec PotentialSpec::custom(Sidedness sidedness, Fn V, Fn dV, Fn d2V) {
  if (!V) throw ValidationError("custom potential: empty evaluator");
  PotentialSpec p;
  p.sidedness_ = sidedness;
  p.tag_ = PotentialTag::custom;
  p.V_ = std::move(V);
  p.dV_ = std::move(dV);
  p.d2V_ = std::move(d2V);
  return p;
}

PotentialSpec PotentialSpec::with_reference_energy(double E_ref) const {
  if (!std::isfinite(E_ref)) throw ValidationError("reference energy must be finite");
  PotentialSpec p = *this;
  p.reference_energy_ = E_ref;
  return p;
}

PotentialSpec PotentialSpec::with_kinks(std::vector<double> kinks) const {
  PotentialSpec p = *this;
  std::sort(kinks.begin(), kinks.end());
  p.kinks_ = std::move(kinks);
  return p;
}

double PotentialSpec::dV(double x) const {
  if (dV_) return dV_(x);
  const double h = 1e-5 * std::max(1.0, std::abs(x));
  return (V_(x + h) - V_(x - h)) / (2.0 * h);
}

double PotentialSpec::d2V(double x) const {
  if (d2V_) return d2V_(x);
  const double h = 1e-4 * std::max(1.0, std::abs(x));
  return (V_(x + h) - 2.0 * V_(x) + V_(x - h)) / (h * h);
}

// --------------------------------------------------------------- seeding

namespace {

template <class Scalar>
double magnitude(Scalar z) {
  return std::abs(z);
}

template <class Scalar>
bool seed_valid(const PotentialSpec& pot, Scalar E, double x, double sigma, double tol) {
  const double V = pot.V(x);
  if (!std::isfinite(V)) return false;
  const double dV = pot.dV(x);
  const double d2V = pot.d2V(x);
  if (!std::isfinite(dV) || !std::isfinite(d2V) || sigma * dV <= 0.0) return false;
  const Scalar Q = Scalar(V) - E;
  const double Qr = V - pot.reference_energy();
  if (std::real(Q) <= 0.0 || Qr <= 0.0) return false;
  for (const double q : {magnitude(Q), Qr}) {
    if (std::abs(dV) > tol * std::pow(q, 1.5)) return false;
    if (std::abs(d2V) > tol * q * q) return false;
  }
  return true;
}

// Second-order LGWKB correction to the log-derivative of the decaying solution,
// written in the coordinate y = sigma x.
template <class Scalar>
Scalar wkb_b(const PotentialSpec& pot, Scalar E, double x) {
  const double V = pot.V(x);
  const double dV = pot.dV(x);
  const double d2V = pot.d2V(x);
  if (!std::isfinite(V) || !std::isfinite(dV) || !std::isfinite(d2V)) return Scalar(0.0);
  const Scalar Q = Scalar(V) - E;
  const Scalar r = dV / Q;
  const Scalar s = d2V / Q;
  return (-s / 8.0 + 5.0 * r * r / 32.0) / std::sqrt(Q);
}

// int of f over [x0, sigma * inf).
template <class Scalar, class F>
Scalar tail_integral(F&& f, double x0, double sigma) {
  auto mirrored = [&](double u) -> Scalar { return f(x0 + sigma * u); };
  if constexpr (std::is_same_v<Scalar, double>) {
    return quad::exp_sinh(mirrored, 0.0, 1e-13, 1e-300).value;
  } else {
    return quad::complex_integral(mirrored, [](auto&& g) {
      return quad::exp_sinh(g, 0.0, 1e-13, 1e-300);
    });
  }
}

// Log-amplitude of the normalised decaying solution at the far seed point t_far,
// with the reference phase int_0^x sqrt(V - E_ref) removed:
// u = log psi + |int_0^x sqrt(V - E_ref)|.
template <class Scalar>
Scalar seed_u(const PotentialSpec& pot, Scalar E, double x0, double sigma) {
  const double Er = pot.reference_energy();
  const Scalar dE = Scalar(Er) - E;
  const Scalar shift = tail_integral<Scalar>(
      [&](double x) -> Scalar {
        const double V = pot.V(x);
        if (!std::isfinite(V)) return Scalar(0.0);
        return dE / (std::sqrt(Scalar(V) - E) + std::sqrt(V - Er));
      },
      x0, sigma);
  const Scalar btail =
      tail_integral<Scalar>([&](double x) { return wkb_b<Scalar>(pot, E, x); }, x0, sigma);
  return -0.25 * std::log(Scalar(pot.V(x0)) - E) + shift - btail;
}

// y = dpsi/dt in t = sigma x, from the LGWKB expansion.
template <class Scalar>
Scalar seed_y(const PotentialSpec& pot, Scalar E, double x0, double sigma) {
  const Scalar Q = Scalar(pot.V(x0)) - E;
  return -std::sqrt(Q) - sigma * pot.dV(x0) / (4.0 * Q) + wkb_b<Scalar>(pot, E, x0);
}

// Deep in the forbidden region psi'' = Q psi is stiff. There the Riccati
// correction z = psi_t / psi + sqrt(Q) and u are smooth, so they are carried
// inward by a fourth-order Rosenbrock scheme (Shampine's constants) from the
// seed point to the hand-over point. The Jacobian is lower triangular, so the
// stage solves are explicit.
template <class Scalar>
std::pair<Scalar, Scalar> riccati_inward(const PotentialSpec& pot, Scalar E, double sigma,
                                         double t_far, double t_near, Scalar y0, Scalar u0) {
  constexpr double GAM = 0.5, A21 = 2.0, A31 = 48.0 / 25.0, A32 = 6.0 / 25.0, C21 = -8.0,
                   C31 = 372.0 / 25.0, C32 = 12.0 / 5.0, C41 = -112.0 / 125.0,
                   C42 = -54.0 / 125.0, C43 = -2.0 / 5.0, B1 = 19.0 / 9.0, B2 = 0.5,
                   B3 = 25.0 / 108.0, B4 = 125.0 / 108.0, E1 = 17.0 / 54.0, E2 = 7.0 / 36.0,
                   E4 = 125.0 / 108.0, C1X = 0.5, C2X = -1.5, C3X = 121.0 / 50.0,
                   C4X = 29.0 / 250.0, A2X = 1.0, A3X = 3.0 / 5.0;
  constexpr double tol = 1e-13;
  const double Er = pot.reference_energy();
  const Complex Ec(E);
  const Complex dE = Ec - Er;

  struct F {
    Complex y, u;
  };
  // F::y holds the z component here.
  auto rhs = [&](double t, Complex z) -> F {
    const double x = sigma * t;
    const double V = pot.V(x);
    const Complex q = std::sqrt(V - Ec);
    const double r = std::sqrt(V - Er);
    return {2.0 * z * q - z * z + sigma * pot.dV(x) / (2.0 * q), z + dE / (r + q)};
  };
  auto dfdt = [&](double t, Complex z) -> F {
    const double x = sigma * t;
    const double V = pot.V(x), dV = pot.dV(x), d2V = pot.d2V(x);
    const Complex q = std::sqrt(V - Ec);
    const double r = std::sqrt(V - Er);
    const Complex dz = z * sigma * dV / q + d2V / (2.0 * q) - dV * dV / (4.0 * q * q * q);
    const Complex du = -dE * sigma * dV * (0.5 / r + 0.5 / q) / ((r + q) * (r + q));
    return {dz, du};
  };
  auto sqrtQ = [&](double t) { return std::sqrt(pot.V(sigma * t) - Ec); };

  Complex y = Complex(y0) + sqrtQ(t_far), u(u0);
  std::vector<double> marks{t_far};
  for (double k : pot.kinks()) {
    const double tk = sigma * k;
    if (tk < t_far && tk > t_near) marks.push_back(tk);
  }
  std::sort(marks.begin(), marks.end(), std::greater<>());
  marks.push_back(t_near);

  double h = -1e-3;
  std::size_t steps = 0;
  for (std::size_t piece = 0; piece + 1 < marks.size(); ++piece) {
    double t = marks[piece];
    const double t_end = marks[piece + 1];
    while (t > t_end) {
      if (++steps > 10000000) throw IntegrationError("shooting: Riccati stage step limit");
      if (t + h < t_end) h = t_end - t;
      const F f0 = rhs(t, y);
      const F ft = dfdt(t, y);
      const Complex dy_diag = 1.0 / (GAM * h) - 2.0 * (sqrtQ(t) - y);
      const double du_diag = 1.0 / (GAM * h);
      auto solve = [&](Complex ry, Complex ru) -> F {
        const Complex gy = ry / dy_diag;
        return {gy, (ru + gy) / du_diag};
      };
      const F g1 = solve(f0.y + h * C1X * ft.y, f0.u + h * C1X * ft.u);
      const F f2 = rhs(t + A2X * h, y + A21 * g1.y);
      const F g2 = solve(f2.y + h * C2X * ft.y + C21 * g1.y / h,
                         f2.u + h * C2X * ft.u + C21 * g1.u / h);
      const F f3 = rhs(t + A3X * h, y + A31 * g1.y + A32 * g2.y);
      const F g3 = solve(f3.y + h * C3X * ft.y + (C31 * g1.y + C32 * g2.y) / h,
                         f3.u + h * C3X * ft.u + (C31 * g1.u + C32 * g2.u) / h);
      const F g4 = solve(f3.y + h * C4X * ft.y + (C41 * g1.y + C42 * g2.y + C43 * g3.y) / h,
                         f3.u + h * C4X * ft.u + (C41 * g1.u + C42 * g2.u + C43 * g3.u) / h);
      const Complex ey = E1 * g1.y + E2 * g2.y + E4 * g4.y;
      const Complex eu = E1 * g1.u + E2 * g2.u + E4 * g4.u;
      const double err = std::max(std::abs(ey) / (1e-10 * (1.0 + std::abs(y))), std::abs(eu) / tol);
      if (!std::isfinite(err)) {
        h *= 0.25;
        continue;
      }
      if (err <= 1.0) {
        y += B1 * g1.y + B2 * g2.y + B3 * g3.y + B4 * g4.y;
        u += B1 * g1.u + B2 * g2.u + B3 * g3.u + B4 * g4.u;
        t += h;
        h *= std::min(1.5, 0.9 * std::pow(std::max(err, 1e-12), -0.25));
      } else {
        h *= std::max(0.5, 0.9 * std::pow(err, -1.0 / 3.0));
      }
      if (std::abs(h) < 1e-14) throw IntegrationError("shooting: Riccati step underflow");
    }
  }
  y -= sqrtQ(t_near);
  if (!std::isfinite(std::abs(y)) || !std::isfinite(std::abs(u)))
    throw IntegrationError("shooting: Riccati stage degenerated");
  if constexpr (std::is_same_v<Scalar, double>) {
    return {y.real(), u.real()};
  } else {
    return {y, u};
  }
}

template <class Scalar>
ShootingState<Scalar> seed_state(const PotentialSpec& pot, Scalar E, Side side, double x_far,
                                 double x_near) {
  const double sigma = side == Side::right ? 1.0 : -1.0;
  const double Er = pot.reference_energy();

  const Scalar u_far = seed_u(pot, E, x_far, sigma);
  const Scalar y_far = seed_y(pot, E, x_far, sigma);
  const auto [y, u] = riccati_inward(pot, E, sigma, sigma * x_far, sigma * x_near, y_far, u_far);

  // E-independent anchor: |int_0^{x_near} sqrt(V - E_ref)|.
  auto sqrt_ref = [&](double x) {
    const double q = pot.V(x) - Er;
    if (q < 0.0) throw ValidationError("shooting: reference energy above V");
    return std::sqrt(q);
  };
  const double lo = std::min(0.0, x_near), hi = std::max(0.0, x_near);
  double anchor = 0.0;
  if (hi > lo) {
    std::vector<double> cuts{lo};
    for (double k : pot.kinks())
      if (k > lo && k < hi) cuts.push_back(k);
    cuts.push_back(hi);
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
      anchor += quad::gauss_kronrod(sqrt_ref, cuts[i], cuts[i + 1], 1e-13, 0.0).value;
  }

  ShootingState<Scalar> st;
  st.x = x_near;
  st.log_scale = std::real(u) - anchor;
  if constexpr (std::is_same_v<Scalar, double>) {
    st.u = 1.0;
  } else {
    st.u = std::exp(Complex(0.0, std::imag(u)));
  }
  st.du = st.u * sigma * y;
  return st;
}

template <class Scalar>
void require_finite_energy(Scalar E) {
  if (!is_finite(E)) throw DomainError("shooting: non-finite energy");
}

template <class Scalar>
double seed_point_from(const PotentialSpec& pot, Scalar E, Side side, const ShootingOptions& opt,
                       double beyond) {
  const double sigma = side == Side::right ? 1.0 : -1.0;
  if (side == Side::left && pot.sidedness() == Sidedness::one)
    throw ValidationError("shooting: one-sided potentials have no left end");
  if (opt.x0) {
    const double x0 = *opt.x0;
    if ((x0 - beyond) * sigma < 0.0)
      throw ValidationError("shooting: forced seed point lies inside the requested range");
    if (!seed_valid(pot, E, x0, sigma, opt.seed_tol))
      throw SeedError("shooting: seed point x0 = " + std::to_string(x0) +
                      " fails the validity test |V'| << (V - E)^{3/2}");
    return x0;
  }
  for (double d = 0.5; d <= 700.0; d += 0.25) {
    const double x = beyond + sigma * d;
    if (seed_valid(pot, E, x, sigma, opt.seed_tol)) return x;
    if (!std::isfinite(pot.V(x))) break;
  }
  throw SeedError("shooting: no seed point satisfies the validity test");
}

// Innermost point, at or beyond `beyond`, from which the decaying solution is
// monotone and the linear integrator is no longer stiff.
template <class Scalar>
double handover_point(const PotentialSpec& pot, Scalar E, double sigma, double beyond,
                      double x_far) {
  const double tol = 0.05;
  for (double d = 0.0; sigma * (beyond + sigma * d) < sigma * x_far; d += 0.25) {
    const double x = beyond + sigma * d;
    if (seed_valid(pot, E, x, sigma, tol)) return x;
  }
  return x_far;
}

}  // namespace

template <class Scalar>
double seed_point(const PotentialSpec& pot, Scalar E, Side side, const ShootingOptions& opt) {
  require_finite_energy(E);
  return seed_point_from(pot, E, side, opt, 0.0);
}

template <class Scalar>
std::vector<ShootingState<Scalar>> decaying_solution(const PotentialSpec& pot, Scalar E, Side side,
                                                     const std::vector<double>& stops,
                                                     const ShootingOptions& opt) {
  require_finite_energy(E);
  if (stops.empty()) return {};
  for (double s : stops)
    if (!std::isfinite(s) || s < pot.lower())
      throw DomainError("decaying_solution: stop outside the domain");
  const double sigma = side == Side::right ? 1.0 : -1.0;
  std::vector<std::size_t> order(stops.size());
  std::iota(order.begin(), order.end(), 0);
  // Travel is towards the interior, i.e. against sigma.
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return sigma * stops[a] > sigma * stops[b]; });
  const double outermost = stops[order.front()];
  const double beyond = sigma > 0 ? std::max(0.0, outermost) : std::min(0.0, outermost);
  const double x_far = seed_point_from(pot, E, side, opt, beyond);
  const double x0 = handover_point(pot, E, sigma, beyond, x_far);
  const auto init = seed_state(pot, E, side, x_far, x0);

  // Kinks of V between x0 and the innermost stop become extra stops.
  std::vector<std::pair<double, long>> sorted;
  for (std::size_t k = 0; k < order.size(); ++k) sorted.push_back({stops[order[k]], static_cast<long>(k)});
  const double innermost = stops[order.back()];
  for (double k : pot.kinks())
    if (sigma * k < sigma * x0 && sigma * k > sigma * innermost) sorted.push_back({k, -1});
  std::stable_sort(sorted.begin(), sorted.end(),
                   [&](const auto& a, const auto& b) { return sigma * a.first > sigma * b.first; });
  std::vector<double> xs;
  for (const auto& s : sorted) xs.push_back(s.first);
  auto q = [&](double x) -> Scalar { return Scalar(pot.V(x)) - E; };
  const auto states = ode::integrate<Scalar>(q, init, std::span<const double>(xs), opt.ode);
  std::vector<ShootingState<Scalar>> out(stops.size());
  for (std::size_t k = 0; k < sorted.size(); ++k)
    if (sorted[k].second >= 0) out[order[static_cast<std::size_t>(sorted[k].second)]] = states[k];
  return out;
}

template <class Scalar>
ShootingState<Scalar> decaying_solution(const PotentialSpec& pot, Scalar E, Side side,
                                        double x_stop, const ShootingOptions& opt) {
  return decaying_solution<Scalar>(pot, E, side, std::vector<double>{x_stop}, opt).front();
}

template <class Scalar>
Scaled<Scalar> characteristic_one_sided(const PotentialSpec& pot, Scalar E,
                                        const ShootingOptions& opt) {
  if (pot.sidedness() != Sidedness::one)
    throw ValidationError("characteristic_one_sided: potential is two-sided");
  const auto s = decaying_solution<Scalar>(pot, E, Side::right, 0.0, opt);
  return {s.u, s.log_scale};
}

template <class Scalar>
Scaled<Scalar> wronskian_at(const PotentialSpec& pot, Scalar E, double x,
                            const ShootingOptions& opt) {
  if (pot.sidedness() != Sidedness::two)
    throw ValidationError("wronskian_at: potential is one-sided");
  const auto p = decaying_solution<Scalar>(pot, E, Side::right, x, opt);
  const auto m = decaying_solution<Scalar>(pot, E, Side::left, x, opt);
  return {p.u * m.du - m.u * p.du, p.log_scale + m.log_scale};
}

template <class Scalar>
Scaled<Scalar> characteristic_two_sided(const PotentialSpec& pot, Scalar E,
                                        const ShootingOptions& opt) {
  return wronskian_at<Scalar>(pot, E, 0.0, opt);
}

Scaled<double> characteristic(const PotentialSpec& pot, double E, const ShootingOptions& opt) {
  return pot.sidedness() == Sidedness::one ? characteristic_one_sided<double>(pot, E, opt)
                                           : characteristic_two_sided<double>(pot, E, opt);
}

double characteristic_log_derivative(const PotentialSpec& pot, double E, double h,
                                     const ShootingOptions& opt) {
  if (!(h > 0.0)) throw ValidationError("characteristic_log_derivative: step must be positive");
  auto L = [&](double e) { return characteristic(pot, e, opt).log_abs(); };
  return (-L(E + 2 * h) + 8 * L(E + h) - 8 * L(E - h) + L(E - 2 * h)) / (12 * h);
}

#define XISPEC_INSTANTIATE(S)                                                                   \
  template double seed_point<S>(const PotentialSpec&, S, Side, const ShootingOptions&);        \
  template std::vector<ShootingState<S>> decaying_solution<S>(                                 \
      const PotentialSpec&, S, Side, const std::vector<double>&, const ShootingOptions&);     \
  template ShootingState<S> decaying_solution<S>(const PotentialSpec&, S, Side, double,        \
                                                 const ShootingOptions&);                      \
  template Scaled<S> characteristic_one_sided<S>(const PotentialSpec&, S, const ShootingOptions&); \
  template Scaled<S> wronskian_at<S>(const PotentialSpec&, S, double, const ShootingOptions&); \
  template Scaled<S> characteristic_two_sided<S>(const PotentialSpec&, S, const ShootingOptions&);

XISPEC_INSTANTIATE(double)
XISPEC_INSTANTIATE(Complex)
#undef XISPEC_INSTANTIATE

// ------------------------------------------------------------ well geometry

namespace {

double well_minimum(const PotentialSpec& pot) {
  const bool one = pot.sidedness() == Sidedness::one;
  const double V0 = pot.V(0.0);
  double X = 1.0;
  while (!(pot.V(X) > V0 + 1.0 && (one || pot.V(-X) > V0 + 1.0))) {
    X *= 2.0;
    if (X > 1e3) throw ValidationError("potential does not grow at the open ends");
  }
  const double lo = one ? 0.0 : -X;
  const int n = 400;
  int best = 0;
  double vbest = INFINITY;
  for (int i = 0; i <= n; ++i) {
    const double v = pot.V(lo + (X - lo) * i / n);
    if (v < vbest) {
      vbest = v;
      best = i;
    }
  }
  const double a = lo + (X - lo) * std::max(0, best - 1) / n;
  const double b = lo + (X - lo) * std::min(n, best + 1) / n;
  const auto r = boost::math::tools::brent_find_minima([&](double x) { return pot.V(x); }, a, b, 52);
  return r.first;
}

int sign_changes(const PotentialSpec& pot, double v, double a, double b) {
  const int n = 8000;
  int changes = 0;
  double prev = pot.V(a) - v;
  for (int i = 1; i <= n; ++i) {
    const double cur = pot.V(a + (b - a) * i / n) - v;
    if ((prev < 0.0) != (cur < 0.0)) ++changes;
    prev = cur;
  }
  return changes;
}

}  // namespace

std::pair<double, double> turning_points(const PotentialSpec& pot, double v) {
  const double xm = well_minimum(pot);
  if (!(pot.V(xm) < v)) throw DomainError("turning_points: level below the bottom of the well");
  auto g = [&](double x) { return pot.V(x) - v; };
  double d = 1.0;
  while (!(g(xm + d) > 0.0)) {
    d *= 2.0;
    if (d > 1e3) throw DomainError("turning_points: no right turning point");
  }
  const double right = bisect_root(g, xm, xm + d);
  double left;
  if (pot.sidedness() == Sidedness::one) {
    left = g(0.0) <= 0.0 ? 0.0 : bisect_root(g, 0.0, xm);
  } else {
    d = 1.0;
    while (!(g(xm - d) > 0.0)) {
      d *= 2.0;
      if (d > 1e3) throw DomainError("turning_points: no left turning point");
    }
    left = bisect_root(g, xm - d, xm);
  }
  const bool wall = pot.sidedness() == Sidedness::one && left == 0.0;
  const double a = wall ? 0.0 : std::max(pot.lower(), left - 20.0);
  const int expected = wall ? 1 : 2;
  if (sign_changes(pot, v, a, right + 20.0) != expected)
    throw ValidationError("turning_points: potential is not a single well at this level");
  return {left, right};
}

WidthFunction width_from_potential(const PotentialSpec& pot, const std::vector<double>& v) {
  const double xm = well_minimum(pot);
  const double vmin = pot.V(xm);
  std::vector<double> vs{vmin}, ws{0.0};
  for (double level : v) {
    if (level <= vs.back()) continue;
    const auto [a, b] = turning_points(pot, level);
    vs.push_back(level);
    ws.push_back(std::max(ws.back(), b - a));
  }
  return WidthFunction::sampled(std::move(vs), std::move(ws));
}

// ---------------------------------------------------------------- LGWKB

namespace {

// max |V'| / (V - E)^{3/2} over the domain; the forbidden-region validity test.
double forbidden_validity(const PotentialSpec& pot, double E) {
  double worst = 0.0;
  const double lo = pot.sidedness() == Sidedness::one ? 0.0 : -40.0;
  for (int i = 0; i <= 8000; ++i) {
    const double x = lo + (40.0 - lo) * i / 8000.0;
    const double V = pot.V(x);
    if (!std::isfinite(V)) continue;
    if (V - E <= 0.0) return INFINITY;
    worst = std::max(worst, std::abs(pot.dV(x)) / std::pow(V - E, 1.5));
  }
  return worst;
}

double half_line(const PotentialSpec& pot, double sigma, double from,
                 const std::function<double(double, double)>& f) {
  auto g = [&](double x) { return f(x, pot.V(x)); };
  // Finite pieces up to the last kink, then the tail.
  std::vector<double> cuts{from};
  for (double k : pot.kinks())
    if ((k - from) * sigma > 0.0) cuts.push_back(k);
  std::sort(cuts.begin(), cuts.end(), [sigma](double a, double b) { return a * sigma < b * sigma; });
  double sum = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double a = std::min(cuts[i], cuts[i + 1]), b = std::max(cuts[i], cuts[i + 1]);
    if (b > a) sum += quad::tanh_sinh(g, a, b, 1e-12, 1e-10).value;
  }
  const double last = cuts.back();
  return sum + quad::exp_sinh([&](double u) { return g(last + sigma * u); }, 0.0, 1e-12, 1e-300).value;
}

struct OscillatoryParts {
  double I1 = 0.0;   // int over the well of sqrt V
  double I2 = 0.0;   // int outside the well of sqrt(V - E) - sqrt V
  double phase = 0.0;  // int over the well of sqrt(E - V)
};

Scaled<Complex> assemble(const OscillatoryParts& p, double E, double v0, Sidedness sidedness) {
  if (sidedness == Sidedness::one) {
    const double log_mag = std::log(2.0) - 0.25 * std::log(E - v0) - p.I1 + p.I2;
    return {std::polar(1.0, p.phase - 0.25 * kPi), log_mag};
  }
  // Re P~ = 4 A cos(phase), as produced by the Wronskian.
  const double log_mag = std::log(4.0) - p.I1 + p.I2;
  return {std::polar(1.0, p.phase), log_mag};
}

}  // namespace

double lgwkb_R(const PotentialSpec& pot, double E) {
  if (!std::isfinite(E)) throw DomainError("lgwkb_R: non-finite E");
  if (forbidden_validity(pot, E) > 0.25)
    throw DomainError("lgwkb_R: E outside the asymptotic regime (V' not << (V - E)^{3/2})");
  auto inv = [E](double, double V) { return std::isfinite(V) ? 1.0 / std::sqrt(V - E) : 0.0; };
  double T = 0.5 * half_line(pot, 1.0, 0.0, inv);
  if (pot.sidedness() == Sidedness::one) return -0.25 / E - T;
  T += 0.5 * half_line(pot, -1.0, 0.0, inv);
  return -T;
}

double lgwkb_R(const WidthFunction& width, double E, Sidedness sidedness) {
  const double T = imaginary_time(width, E);
  return sidedness == Sidedness::one ? -0.25 / E - T : -T;
}

Scaled<Complex> lgwkb_oscillatory(const PotentialSpec& pot, double E) {
  if (!std::isfinite(E)) throw DomainError("lgwkb_oscillatory: non-finite E");
  const double xm = well_minimum(pot);
  if (pot.V(xm) < 0.0) throw ValidationError("lgwkb_oscillatory: requires V >= 0");
  const auto [a, b] = turning_points(pot, E);
  for (double t : {a, b}) {
    if (pot.sidedness() == Sidedness::one && t == 0.0) continue;
    if (std::abs(pot.d2V(t)) >= std::pow(std::abs(pot.dV(t)), 4.0 / 3.0))
      throw DomainError("lgwkb_oscillatory: V'' not << |V'|^{4/3} at the turning point");
  }
  OscillatoryParts p;
  std::vector<double> cuts{a};
  for (double k : pot.kinks())
    if (k > a && k < b) cuts.push_back(k);
  cuts.push_back(b);
  auto over_well = [&](auto&& f) {
    double sum = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
      sum += quad::tanh_sinh(f, cuts[i], cuts[i + 1], 1e-12, 1e-10).value;
    return sum;
  };
  p.I1 = over_well([&](double x) { return std::sqrt(std::max(0.0, pot.V(x))); });
  p.phase = over_well([&](double x) { return std::sqrt(std::max(0.0, E - pot.V(x))); });
  auto outside = [E](double, double V) {
    return std::isfinite(V) ? -E / (std::sqrt(std::max(0.0, V - E)) + std::sqrt(V)) : 0.0;
  };
  p.I2 = half_line(pot, 1.0, b, outside);
  if (pot.sidedness() == Sidedness::two) p.I2 += half_line(pot, -1.0, a, outside);
  return assemble(p, E, pot.V(a), pot.sidedness());
}

namespace {

// int_{[lo, hi)} g(v) dw(v) for the two closed-form integrands needed below,
// given through their antiderivatives on linear segments (G) and against the
// log tail c dv / v (H).
struct Stieltjes {
  std::function<double(double)> g;
  std::function<double(double, double)> G;  // int_a^b g(v) dv
  std::function<double(double, double)> H;  // int_a^b g(v) / v dv, b may be inf
};

double stieltjes_sampled(const WidthFunction& width, const Stieltjes& s, double lo, double hi) {
  const auto& v = width.v_samples();
  const auto& w = width.w_samples();
  double sum = 0.0;
  if (w.front() > 0.0 && v.front() >= lo && v.front() < hi) sum += w.front() * s.g(v.front());
  for (std::size_t i = 0; i + 1 < v.size(); ++i) {
    const double dw = w[i + 1] - w[i];
    if (dw == 0.0) continue;
    if (v[i + 1] == v[i]) {
      if (v[i] >= lo && v[i] < hi) sum += dw * s.g(v[i]);
      continue;
    }
    const double a = std::max(lo, v[i]);
    const double b = std::min(hi, v[i + 1]);
    if (b > a) sum += dw / (v[i + 1] - v[i]) * s.G(a, b);
  }
  const double a = std::max(lo, v.back());
  if (hi > a) sum += width.tail_log_coefficient() * s.H(a, hi);
  return sum;
}

double stieltjes_exp(const WidthFunction& width, const std::function<double(double)>& g,
                     double lo, double hi) {
  const double wl = width.width(lo);
  auto f = [&](double w) { return g(width.height(w)); };
  if (std::isinf(hi)) return quad::exp_sinh([&](double u) { return f(wl + u); }, 0.0, 1e-12, 1e-300).value;
  return quad::tanh_sinh(f, wl, width.width(hi), 1e-12, 1e-300).value;
}

double stieltjes(const WidthFunction& width, const Stieltjes& s, double lo, double hi) {
  if (width.kind() == WidthFunction::Kind::Sampled) return stieltjes_sampled(width, s, lo, hi);
  return stieltjes_exp(width, s.g, lo, hi);
}

double p15(double x) { return x * std::sqrt(x); }

}  // namespace

Scaled<Complex> lgwkb_oscillatory(const WidthFunction& width, double E, Sidedness sidedness) {
  if (!std::isfinite(E)) throw DomainError("lgwkb_oscillatory: non-finite E");
  const double v0 = width.v_min();
  if (v0 < 0.0) throw ValidationError("lgwkb_oscillatory: requires V >= 0");
  if (!(E > v0)) throw DomainError("lgwkb_oscillatory: E below the bottom of the well");

  const Stieltjes root{
      [](double v) { return std::sqrt(v); },
      [](double a, double b) { return 2.0 / 3.0 * (p15(b) - p15(a)); },
      [](double a, double b) { return 2.0 * (std::sqrt(b) - std::sqrt(a)); }};
  const Stieltjes below{
      [E](double v) { return std::sqrt(std::max(0.0, E - v)); },
      [E](double a, double b) { return 2.0 / 3.0 * (p15(E - a) - p15(std::max(0.0, E - b))); },
      [E](double a, double b) {
        auto F = [E](double v) {
          const double u = std::sqrt(std::max(0.0, E - v));
          const double r = std::sqrt(E);
          return 2.0 * u + r * std::log((r - u) / (r + u));
        };
        return F(b) - F(a);
      }};
  const Stieltjes above{
      [E](double v) { return -E / (std::sqrt(std::max(0.0, v - E)) + std::sqrt(v)); },
      [E](double a, double b) {
        // (2/3)[(v - E)^{3/2} - v^{3/2}] without cancellation.
        auto F = [E](double v) {
          const double d = std::max(0.0, v - E);
          return -2.0 / 3.0 * E * (3.0 * v * v - 3.0 * v * E + E * E) / (p15(d) + p15(v));
        };
        return F(b) - F(a);
      },
      [E](double a, double b) {
        // int_a^inf (sqrt(v - E) - sqrt v) / v dv, a >= E > 0.
        auto tail = [E](double v) {
          const double d = std::max(0.0, v - E);
          return 2.0 * E / (std::sqrt(v) + std::sqrt(d)) -
                 2.0 * std::sqrt(E) * std::atan(std::sqrt(E / d));
        };
        return std::isinf(b) ? tail(a) : tail(a) - tail(b);
      }};

  OscillatoryParts p;
  p.I1 = stieltjes(width, root, v0, E);
  p.phase = stieltjes(width, below, v0, E);
  p.I2 = stieltjes(width, above, E, INFINITY);
  return assemble(p, E, v0, sidedness);
}

// -------------------------------------------------------------- zero finding

std::vector<double> find_zeros(const std::function<double(double)>& f, double lo, double hi,
                               double step, std::size_t max_count, double tol) {
  if (!(hi > lo) || !(step > 0.0) || !std::isfinite(lo) || !std::isfinite(hi))
    throw ValidationError("find_zeros: need lo < hi and a positive step");
  auto eval = [&](double x) {
    const double y = f(x);
    if (!std::isfinite(y))
      throw EvaluationError("find_zeros: non-finite value at " + std::to_string(x));
    return y;
  };
  std::vector<double> out;
  double a = lo;
  double fa = eval(a);
  if (fa == 0.0) out.push_back(a);
  const auto n = static_cast<long>(std::ceil((hi - lo) / step));
  for (long k = 1; k <= n && out.size() < max_count; ++k) {
    const double b = k == n ? hi : lo + static_cast<double>(k) * step;
    const double fb = eval(b);
    if (fb == 0.0) {
      out.push_back(b);
    } else if (fa != 0.0 && (fa < 0.0) != (fb < 0.0)) {
      const auto r = boost::math::tools::bisect(
          eval, a, b, [tol](double x, double y) { return std::abs(y - x) <= tol; });
      out.push_back(0.5 * (r.first + r.second));
    }
    a = b;
    fa = fb;
  }
  if (out.size() > max_count) out.resize(max_count);
  return out;
}

// ------------------------------------------------------- reconstruction

namespace {

// int_{x_i}^{x_{i+1}} of the cubic through four neighbouring nodes.
double cubic_panel(const std::vector<double>& x, const std::vector<double>& y, std::size_t i) {
  const std::size_t n = x.size();
  if (n == 2) return 0.5 * (x[1] - x[0]) * (y[0] + y[1]);
  const std::size_t m = std::min<std::size_t>(4, n);
  std::size_t s = i == 0 ? 0 : i - 1;
  if (s + m > n) s = n - m;
  auto lagrange = [&](double t) {
    double sum = 0.0;
    for (std::size_t j = s; j < s + m; ++j) {
      double l = 1.0;
      for (std::size_t k = s; k < s + m; ++k)
        if (k != j) l *= (t - x[k]) / (x[j] - x[k]);
      sum += y[j] * l;
    }
    return sum;
  };
  const double h = x[i + 1] - x[i];
  const double mid = x[i] + 0.5 * h;
  const double off = 0.5 * h / std::sqrt(3.0);
  return 0.5 * h * (lagrange(mid - off) + lagrange(mid + off));
}

}  // namespace

CharacteristicSamples reconstruct_characteristic(const std::vector<double>& E,
                                                 const std::vector<double>& R, double E0, double C,
                                                 std::vector<double> poles) {
  if (E.size() != R.size() || E.size() < 2)
    throw ValidationError("reconstruct_characteristic: need matching grids of size >= 2");
  for (std::size_t i = 0; i < E.size(); ++i) {
    if (!std::isfinite(E[i])) throw ValidationError("reconstruct_characteristic: non-finite E");
    if (!std::isfinite(R[i]))
      throw ValidationError("reconstruct_characteristic: pole on grid node E = " +
                            std::to_string(E[i]) + "; shift the grid");
    if (i > 0 && !(E[i] > E[i - 1]))
      throw ValidationError("reconstruct_characteristic: E must be strictly increasing");
  }
  const auto it = std::find(E.begin(), E.end(), E0);
  if (it == E.end()) throw ValidationError("reconstruct_characteristic: E0 must be a grid node");
  const std::size_t i0 = static_cast<std::size_t>(it - E.begin());

  if (poles.empty()) {
    // R ~ 1/(E - p) across a simple zero: both nodes point at the same p.
    for (std::size_t i = 0; i + 1 < E.size(); ++i) {
      if (!(R[i] < 0.0 && R[i + 1] > 0.0)) continue;
      const double h = E[i + 1] - E[i];
      const double p1 = E[i] - 1.0 / R[i];
      const double p2 = E[i + 1] - 1.0 / R[i + 1];
      if (!(p1 > E[i] && p1 < E[i + 1] && p2 > E[i] && p2 < E[i + 1] && std::abs(p1 - p2) < 0.25 * h))
        continue;
      // 1/R is smooth through the zero: cubic through the four nearest nodes.
      const std::size_t lo = i == 0 ? 0 : std::min(i - 1, E.size() >= 4 ? E.size() - 4 : 0);
      const std::size_t hi = std::min(E.size(), lo + 4);
      auto g = [&](double e) {
        double sum = 0.0;
        for (std::size_t j = lo; j < hi; ++j) {
          double w = 1.0 / R[j];
          for (std::size_t k = lo; k < hi; ++k)
            if (k != j) w *= (e - E[k]) / (E[j] - E[k]);
          sum += w;
        }
        return sum;
      };
      double p = 0.5 * (p1 + p2);
      if (g(E[i]) < 0.0 && g(E[i + 1]) > 0.0) {
        std::uintmax_t iters = 100;
        const auto br = boost::math::tools::toms748_solve(
            g, E[i], E[i + 1], boost::math::tools::eps_tolerance<double>(50), iters);
        p = 0.5 * (br.first + br.second);
      }
      poles.push_back(p);
    }
  }
  for (double p : poles)
    if (std::find(E.begin(), E.end(), p) != E.end())
      throw ValidationError("reconstruct_characteristic: pole on grid node; shift the grid");

  std::vector<double> reg(R);
  for (std::size_t i = 0; i < E.size(); ++i)
    for (double p : poles) reg[i] -= 1.0 / (E[i] - p);

  std::vector<double> cum(E.size(), 0.0);
  for (std::size_t i = 0; i + 1 < E.size(); ++i) cum[i + 1] = cum[i] + cubic_panel(E, reg, i);

  CharacteristicSamples out;
  out.E = E;
  out.provenance = Provenance::shooting;
  out.values.resize(E.size());
  for (std::size_t i = 0; i < E.size(); ++i) {
    double factor = 1.0;
    for (double p : poles) factor *= (E[i] - p) / (E0 - p);
    out.values[i] = C * std::exp(cum[i] - cum[i0]) * factor;
  }
  return out;
}

}  // namespace xispec
