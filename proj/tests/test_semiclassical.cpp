#include <doctest.h>

#include <cmath>
#include <vector>

#include <boost/math/quadrature/tanh_sinh.hpp>

#include "xispec/semiclassical.hpp"
#include "xispec/special_functions.hpp"

using namespace xispec;

namespace {

const double k4Pi2 = 4.0 * kPi * kPi;

double log_xi_real_axis(double E) {
  // log Xi(E) = log xi(2 sqrt(E)); for E < 0 the argument is 2i sqrt(-E).
  return log_xi_zeta({0.0, 2.0 * std::sqrt(-E)}).real();
}

double dlog_xi(double E) {
  const double h = 1e-3 * std::abs(E);
  return (-log_xi_real_axis(E + 2 * h) + 8 * log_xi_real_axis(E + h) - 8 * log_xi_real_axis(E - h) +
          log_xi_real_axis(E - 2 * h)) /
         (12 * h);
}

}  // namespace

TEST_CASE("width functions") {
  const auto w = WidthFunction::exp_quadratic(9 * kPi, 1.0);
  CHECK(w.v_min() == doctest::Approx(k4Pi2 - 9 * kPi + 1.0));
  CHECK(w.width(w.v_min() - 1.0) == 0.0);
  for (double x : {0.0, 0.3, 2.0, 7.0}) CHECK(w.width(w.height(x)) == doctest::Approx(x).epsilon(1e-12));
  CHECK_THROWS_AS(WidthFunction::exp_quadratic(8 * kPi * kPi + 1.0, 0.0), ValidationError);
  CHECK_NOTHROW(WidthFunction::exp_quadratic(8 * kPi * kPi, 0.0));

  const auto s = WidthFunction::sampled({1.0, 2.0, 2.0, 4.0}, {0.0, 1.0, 1.5, 2.5}, 0.0);
  CHECK(s.width(1.5) == doctest::Approx(0.5));
  CHECK(s.width(2.0) == doctest::Approx(1.5));
  CHECK(s.width(3.0) == doctest::Approx(2.0));
  CHECK(s.width(0.5) == 0.0);
  CHECK_THROWS_AS(WidthFunction::sampled({1.0, 0.5}, {0.0, 1.0}), ValidationError);
  CHECK_THROWS_AS(WidthFunction::sampled({1.0, 2.0}, {1.0, 0.5}), ValidationError);
}

TEST_CASE("Weyl action") {
  const auto lead = WidthFunction::exp_quadratic(0.0, 0.0);
  CHECK(weyl_action(lead, k4Pi2) == 0.0);
  CHECK(weyl_action(lead, 1.0) == 0.0);
  CHECK(CountingFunction::riemann().value(kPi * kPi * std::exp(2.0)) == doctest::Approx(0.0).epsilon(1e-14));

  // Independent Stieltjes quadrature: dw = dv / (2v) above 4 pi^2.
  boost::math::quadrature::tanh_sinh<double> ts;
  for (double E : {2 * k4Pi2, 1e3, 1e5}) {
    const double ref = 2.0 * ts.integrate([&](double v) { return std::sqrt(E - v) / (2.0 * v); }, k4Pi2, E);
    CHECK(weyl_action(lead, E) == doctest::Approx(ref).epsilon(1e-11));
  }

  // Closed-form family by quadrature against a finely sampled width.
  const auto fam = WidthFunction::exp_quadratic(9 * kPi, 1.0);
  std::vector<double> vs, ws;
  for (int i = 0; i <= 20000; ++i) {
    const double x = 8.0 * i / 20000.0;
    ws.push_back(x);
    vs.push_back(fam.height(x));
  }
  const auto samp = WidthFunction::sampled(vs, ws);
  for (double E : {100.0, 1e3, 1e5}) CHECK(weyl_action(samp, E) == doctest::Approx(weyl_action(fam, E)).epsilon(1e-6));

  // A plateau: width jumps by 2 at v = 5.
  const auto plat = WidthFunction::sampled({0.0, 5.0, 5.0, 10.0}, {0.0, 1.0, 3.0, 4.0}, 0.0);
  const double E = 8.0;
  const double expect = 2.0 * ((1.0 / 5.0) * (2.0 / 3.0) * (std::pow(8.0, 1.5) - std::pow(3.0, 1.5)) +
                               2.0 * std::sqrt(3.0) + (1.0 / 5.0) * (2.0 / 3.0) * std::pow(3.0, 1.5));
  CHECK(weyl_action(plat, E) == doctest::Approx(expect).epsilon(1e-14));
  CHECK_THROWS_AS(CountingFunction::sampled({1.0, 2.0, 3.0}, {0.0, 2.0, 1.0}), ValidationError);
}

TEST_CASE("Abel inversion") {
  const auto W = CountingFunction::riemann();
  CHECK(std::abs(abel_invert(W, k4Pi2)) < 1e-12);
  CHECK(abel_invert(W, k4Pi2 * std::exp(2.0)) == doctest::Approx(1.0).epsilon(1e-12));
  for (double v = 1e3; v <= 1e6; v *= 1.7)
    CHECK(abel_invert(W, v) == doctest::Approx(std::log(std::sqrt(v) / kTwoPi)).epsilon(1e-3));

  // The exact Weyl action of 4 pi^2 e^{2w} inverts to the same width.
  const auto Wexp = CountingFunction::exponential_weyl();
  for (double v : {50.0, 1e3, 1e6})
    CHECK(abel_invert(Wexp, v) == doctest::Approx(std::log(std::sqrt(v) / kTwoPi)).epsilon(1e-10));

  // Sampled W reproduces the analytic inverse.
  std::vector<double> Es, Ws;
  for (double E = 0.0; E <= 2e3; E += 0.5) {
    Es.push_back(E);
    Ws.push_back(Wexp.value(E));
  }
  const auto Ws_s = CountingFunction::sampled(Es, Ws);
  CHECK(abel_invert(Ws_s, 1500.0, 1e-4) == doctest::Approx(std::log(std::sqrt(1500.0) / kTwoPi)).epsilon(1e-4));
  std::vector<double> Ec{0.0, 1.0, 2.0, 3.0, 100.0}, Wc{0, 0, 0, 0, 100.0};
  CHECK_THROWS_AS(abel_invert(CountingFunction::sampled(Ec, Wc), 60.0), ConvergenceError);

  // Monotone output for nondecreasing input.
  double prev = -1e300;
  for (double v = 45.0; v < 2e3; v *= 1.3) {
    const double w = abel_invert(Ws_s, v, 1e-3);
    CHECK(w >= prev);
    prev = w;
  }

  // A c log E correction shifts w by O(v^{-1/2} log v).
  const double c = 3.0;
  const auto Wp = W.plus_log(c);
  std::vector<double> vs, rs;
  for (double v = 1e4; v <= 1e5 * 1.0001; v *= std::pow(10.0, 0.1)) {
    const double resid = abel_invert(Wp, v) - std::log(std::sqrt(v) / kTwoPi);
    const double exact = c / kPi * 2.0 / std::sqrt(v) * std::atanh(std::sqrt(1.0 - 1.0 / v));
    CHECK(resid == doctest::Approx(exact).epsilon(1e-8));
    vs.push_back(v);
    rs.push_back(resid / std::log(v));
  }
  CHECK(std::abs(loglog_slope(vs, rs) + 0.5) < 0.1);

  // Smoothed count: the 7/8 point mass adds (7/4)/sqrt(v).
  const auto Wsm = CountingFunction::riemann(true);
  CHECK(abel_invert(Wsm, 1e4) - abel_invert(W, 1e4) == doctest::Approx(1.75 / 100.0).epsilon(1e-10));
}

TEST_CASE("Abel round trip through a sampled width") {
  const auto W = CountingFunction::exponential_weyl();
  std::vector<double> vs, ws;
  vs.push_back(k4Pi2);
  ws.push_back(0.0);
  for (double v = k4Pi2 * 1.002; v < 2e6; v *= 1.002) {
    vs.push_back(v);
    ws.push_back(std::max(ws.back(), abel_invert(W, v)));
  }
  const auto width = WidthFunction::sampled(vs, ws);
  for (double E = 1e3; E <= 1e6; E *= 3.0)
    CHECK(weyl_action(width, E) == doctest::Approx(W.value(E)).epsilon(1e-3));
}

TEST_CASE("log sin integral by the doubling identity") {
  boost::math::quadrature::tanh_sinh<double> ts;
  const double L = ts.integrate([](double t) { return 2.0 * std::log(std::sin(t)); }, 0.0, 0.5 * kPi);
  // sin t = 2 sin(t/2) cos(t/2) gives L = pi log 2 + 2L.
  CHECK(L == doctest::Approx(-kPi * std::log(2.0)).epsilon(1e-13));
  CHECK(L == doctest::Approx(kPi * std::log(2.0) + 2.0 * L).epsilon(1e-13));
}

TEST_CASE("imaginary time") {
  const auto lead = WidthFunction::exp_quadratic(0.0, 0.0);
  CHECK(imaginary_time(lead, -k4Pi2) == doctest::Approx(imaginary_time_quadrature(lead, -k4Pi2)).epsilon(1e-8));
  const auto b9 = WidthFunction::exp_quadratic(9 * kPi, 0.0);
  CHECK(imaginary_time(b9, -100.0) == doctest::Approx(imaginary_time_quadrature(b9, -100.0)).epsilon(1e-8));

  for (double beta : {0.0, 7 * kPi, 9 * kPi})
    for (double gamma : {0.0, 1.0}) {
      const auto w = WidthFunction::exp_quadratic(beta, gamma);
      double prev = 1e300;
      for (double E : {-10.0, -1e2, -1e4}) {
        const double t = imaginary_time(w, E);
        CHECK(std::abs(t - imaginary_time_quadrature(w, E)) <= 1e-8 * t);
        CHECK(t > 0.0);
        CHECK(t < prev);
        prev = t;
      }
    }

  // Sampled representation of the same width.
  std::vector<double> vs, ws;
  for (int i = 0; i <= 40000; ++i) {
    const double x = 10.0 * i / 40000.0;
    ws.push_back(x);
    vs.push_back(b9.height(x));
  }
  const auto samp = WidthFunction::sampled(vs, ws, 0.5);
  for (double E : {-10.0, -1e3}) CHECK(imaginary_time(samp, E) == doctest::Approx(imaginary_time(b9, E)).epsilon(1e-6));

  // kappa recovered from the E^{-1} term.
  const double s = 1e3;
  const double kappa = s * (2.0 * s * imaginary_time(b9, -s * s) - std::log(s / kPi));
  CHECK(kappa == doctest::Approx(2.25).epsilon(0.01));

  CHECK_THROWS_AS(imaginary_time(b9, b9.v_min()), DomainError);
  CHECK_THROWS_AS(imaginary_time(b9, 1e3), DomainError);
}

TEST_CASE("fit_beta and beta discrimination") {
  CHECK(fit_beta(2.25) == doctest::Approx(9 * kPi));
  CHECK(fit_beta(1.75) == doctest::Approx(7 * kPi));
  CHECK(fit_beta(0.0) == 0.0);
  CHECK_THROWS_AS(fit_beta(2.0 * kPi + 0.1), ValidationError);

  auto residuals = [](double beta) {
    const auto w = WidthFunction::exp_quadratic(beta, 0.0);
    std::vector<double> Es{1e4, 1e5, 1e6}, rs;
    for (double E : Es) rs.push_back(imaginary_time(w, -E) - imaginary_time_expansion(-E, 2.25));
    return std::pair{Es, rs};
  };
  const auto [E9, r9] = residuals(9 * kPi);
  const auto [E8, r8] = residuals(8 * kPi);
  CHECK(loglog_slope(E9, r9) < -1.25);
  CHECK(loglog_slope(E8, r8) > -1.1);
  CHECK(std::abs(r9[2] * E9[2]) < 0.5 * std::abs(r9[0] * E9[0]));
  CHECK(std::abs(r8[2] * E8[2]) > 0.5 * std::abs(r8[0] * E8[0]));
}

TEST_CASE("Riemann count") {
  CHECK(riemann_count(kTwoPi * std::exp(1.0)) == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(riemann_count(kTwoPi * std::exp(1.0), true) == doctest::Approx(0.875));
  CHECK(riemann_count(100.0) == doctest::Approx(28.127).epsilon(1e-4));
  CHECK(std::abs(riemann_count(100.0) - 29.0) < std::log(100.0));
  // Xi has 10 zeros with E < 625 (xi zeros below omega = 50).
  const double E = 625.0;
  const int count = 10;
  CHECK(riemann_count(2.0 * std::sqrt(E)) <= count);
  CHECK(count <= riemann_count(2.0 * std::sqrt(E + 1.0 / 16.0)) + std::log(E));
  for (double E : {50.0, 1e3})
    for (bool smoothed : {false, true})
      CHECK(CountingFunction::riemann(smoothed).value(E) ==
            doctest::Approx(kTwoPi * riemann_count(2.0 * std::sqrt(E), smoothed)).epsilon(1e-14));
  CHECK_THROWS_AS(riemann_count(0.0), DomainError);
}

TEST_CASE("log-derivative asymptotics") {
  CHECK(xi_logderiv_asymptotic(-kPi * kPi) == doctest::Approx(-7.0 / (8.0 * kPi * kPi)).epsilon(1e-14));
  const double e4 = dlog_xi(-1e4) - xi_logderiv_asymptotic(-1e4);
  const double e6 = dlog_xi(-1e6) - xi_logderiv_asymptotic(-1e6);
  CHECK(std::abs(e4) < 0.01 * std::abs(dlog_xi(-1e4)));
  CHECK(std::abs(e6) < std::abs(e4));
  const double ratio = e4 / e6;
  CHECK(ratio > 0.5 * 1000.0);
  CHECK(ratio < 2.0 * 1000.0);

  CHECK(whittaker_logderiv_asymptotic(-1e4, 0.0) == xi_logderiv_asymptotic(-1e4));
  CHECK(whittaker_logderiv_asymptotic(-1e4, 1.0) - whittaker_logderiv_asymptotic(-1e4, 0.0) ==
        doctest::Approx(std::log(100.0 / (kPi * std::exp(1.0))) / 4e6).epsilon(1e-10));
  CHECK_THROWS_AS(xi_logderiv_asymptotic(1.0), DomainError);
}

TEST_CASE("loglog slope") {
  std::vector<double> x{1, 2, 4, 8}, y{3, 3.0 / std::pow(2, 1.5), 3.0 / std::pow(4, 1.5), 3.0 / std::pow(8, 1.5)};
  CHECK(loglog_slope(x, y) == doctest::Approx(-1.5));
}
