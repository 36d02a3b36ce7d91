#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <span>
#include <vector>

#include <boost/numeric/odeint/stepper/controlled_runge_kutta.hpp>
#include <boost/numeric/odeint/stepper/generation.hpp>
#include <boost/numeric/odeint/stepper/runge_kutta_fehlberg78.hpp>

#include "xispec/common.hpp"

// Adaptive integration of u'' = q(x) u with log-rescaling of (u, u'). The
// rescaling exponent is carried separately so that solutions spanning
// thousands of orders of magnitude stay representable.
namespace xispec::ode {

template <class Scalar>
struct LinearState {
  double x = 0.0;
  Scalar u{};
  Scalar du{};
  double log_scale = 0.0;
};

struct Options {
  double rel_tol = 1e-12;
  double abs_tol = 1e-300;
  long max_steps = 20'000'000;
  double initial_step = 1e-3;
};

namespace detail {

template <class Scalar>
double magnitude(const std::array<Scalar, 2>& s) {
  return std::max(std::abs(s[0]), std::abs(s[1]));
}

}  // namespace detail

/// Integrates from init.x through each stop in `stops` (which must be ordered
/// in the direction of travel) and returns the state at every stop.
template <class Scalar, class Q>
std::vector<LinearState<Scalar>> integrate(Q&& q, LinearState<Scalar> init,
                                           std::span<const double> stops,
                                           const Options& opt = {}) {
  namespace odeint = boost::numeric::odeint;
  using State = std::array<Scalar, 2>;
  using Stepper = odeint::runge_kutta_fehlberg78<State>;

  std::vector<LinearState<Scalar>> out;
  out.reserve(stops.size());
  if (stops.empty()) return out;

  const double dir = stops.back() >= init.x ? 1.0 : -1.0;
  for (std::size_t i = 1; i < stops.size(); ++i)
    if ((stops[i] - stops[i - 1]) * dir < 0.0)
      throw ValidationError("ode::integrate: stops not ordered along the direction of travel");

  auto rhs = [&q](const State& s, State& ds, double x) {
    ds[0] = s[1];
    ds[1] = q(x) * s[0];
  };

  auto controlled = odeint::make_controlled<Stepper>(opt.abs_tol, opt.rel_tol);
  State s{init.u, init.du};
  double x = init.x;
  double log_scale = init.log_scale;
  double dt = dir * std::abs(opt.initial_step);
  long steps = 0;

  for (const double stop : stops) {
    while ((stop - x) * dir > 0.0) {
      const double remaining = stop - x;
      if (std::abs(dt) > std::abs(remaining)) dt = remaining;
      const double x_before = x;
      const auto res = controlled.try_step(rhs, s, x, dt);
      if (++steps > opt.max_steps)
        throw IntegrationError("ode::integrate: step budget exhausted near x = " +
                               std::to_string(x));
      if (res == odeint::success) {
        const double m = detail::magnitude(s);
        if (!std::isfinite(m) || m == 0.0)
          throw IntegrationError("ode::integrate: solution degenerated at x = " +
                                 std::to_string(x));
        if (m > 1e50 || m < 1e-50) {
          s[0] /= m;
          s[1] /= m;
          log_scale += std::log(m);
        }
      } else if (x == x_before && std::abs(dt) < 1e-14 * std::max(1.0, std::abs(x))) {
        throw IntegrationError("ode::integrate: step size underflow at x = " +
                               std::to_string(x));
      }
    }
    x = stop;
    out.push_back({x, s[0], s[1], log_scale});
  }
  return out;
}

template <class Scalar, class Q>
LinearState<Scalar> integrate_to(Q&& q, LinearState<Scalar> init, double stop,
                                 const Options& opt = {}) {
  const double stops[] = {stop};
  return integrate<Scalar>(std::forward<Q>(q), init, std::span<const double>(stops), opt)
      .front();
}

}  // namespace xispec::ode
