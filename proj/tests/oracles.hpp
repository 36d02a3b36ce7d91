#pragma once

// Independent reference implementations used only by the tests. They run in
// quad precision and share no code with the library.

#include <cmath>
#include <complex>
#include <vector>

#include <boost/math/constants/constants.hpp>
#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/bernoulli.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/multiprecision/cpp_complex.hpp>

namespace oracle {

using Real = boost::multiprecision::cpp_bin_float_quad;
using Cplx = boost::multiprecision::cpp_complex_quad;

inline Real pi() { return boost::math::constants::pi<Real>(); }

// psi(x) by the plain series.
inline double psi(double xd) {
  const Real x = xd;
  Real sum = 0;
  for (int n = 1; n < 2000; ++n) {
    const Real t = exp(-pi() * n * n * x);
    sum += t;
    if (t < Real(1e-40) * sum) break;
  }
  return static_cast<double>(sum);
}

inline double phi(double td) {
  const Real t = abs(Real(td));
  Real sum = 0;
  for (int n = 1; n < 200; ++n) {
    const Real n2 = Real(n) * n;
    const Real g = exp(-pi() * n2 * exp(2 * t));
    sum += (4 * pi() * pi() * n2 * n2 * exp(Real(4.5) * t) - 6 * pi() * n2 * exp(Real(2.5) * t)) * g;
    if (g < Real(1e-60)) break;
  }
  return static_cast<double>(sum);
}

// log Gamma by recurrence to Re z >= 40 and a 20-term Stirling series.
inline Cplx log_gamma(Cplx z) {
  Cplx shift = 0;
  while (z.real() < 40) {
    shift += log(z);
    z += 1;
  }
  Cplx series = 0;
  Cplx p = Cplx(1) / z;
  const Cplx inv2 = p * p;
  for (int k = 1; k <= 20; ++k) {
    series += boost::math::bernoulli_b2n<Real>(k) / (Real(2 * k) * (2 * k - 1)) * p;
    p *= inv2;
  }
  return (z - Real(0.5)) * log(z) - z + log(2 * pi()) / 2 + series - shift;
}

// zeta(s) by Euler-Maclaurin with a generous cutoff.
inline Cplx zeta(Cplx s) {
  const int M = 40;
  const int N = 30 + static_cast<int>(2 * static_cast<double>(abs(s)));
  Cplx sum = 0;
  for (int n = 1; n < N; ++n) sum += exp(-s * log(Real(n)));
  const Real Nr = N;
  sum += exp((Real(1) - s) * log(Nr)) / (s - Real(1)) + exp(-s * log(Nr)) / 2;
  Cplx rising = s;
  Real fact = 2;
  for (int k = 1; k <= M; ++k) {
    sum += boost::math::bernoulli_b2n<Real>(k) / fact * rising * exp(-(s + Real(2 * k - 1)) * log(Nr));
    rising *= (s + Real(2 * k - 1)) * (s + Real(2 * k));
    fact *= Real(2 * k + 1) * (2 * k + 2);
  }
  return sum;
}

inline std::complex<double> to_double(const Cplx& z) {
  return {static_cast<double>(z.real()), static_cast<double>(z.imag())};
}

inline std::complex<double> zeta_critical(double w) {
  return to_double(zeta(Cplx(Real(0.5), Real(w))));
}

// xi(omega) = -(w^2 + 1/4)/2 Gamma(1/4 + iw/2) pi^{-1/4 - iw/2} zeta(1/2 + iw).
inline std::complex<double> xi(std::complex<double> wd) {
  const Cplx w(Real(wd.real()), Real(wd.imag()));
  const Cplx i(0, 1);
  const Cplx a = Cplx(Real(0.25)) + i * w / 2;
  const Cplx s = Cplx(Real(0.5)) + i * w;
  return to_double(-(w * w + Real(0.25)) / 2 * exp(log_gamma(a) - a * log(pi())) * zeta(s));
}

inline double hardy_Z(double wd) {
  const Real w = wd;
  const Cplx i(0, 1);
  const Real theta = log_gamma(Cplx(Real(0.25), w / 2)).imag() - w / 2 * log(pi());
  return static_cast<double>((exp(i * theta) * zeta(Cplx(Real(0.5), w))).real());
}

// Zeros of Z by a fine scan and bisection in quad precision.
inline std::vector<double> hardy_zeros(double lo, double hi, double step = 0.05) {
  std::vector<double> out;
  double a = lo;
  double fa = hardy_Z(a);
  for (double b = lo + step; b <= hi + 1e-12; b += step) {
    const double fb = hardy_Z(b);
    if ((fa < 0) != (fb < 0)) {
      double x0 = a, x1 = b, f0 = fa;
      for (int it = 0; it < 60; ++it) {
        const double m = 0.5 * (x0 + x1);
        const double fm = hardy_Z(m);
        if ((fm < 0) == (f0 < 0)) {
          x0 = m;
          f0 = fm;
        } else {
          x1 = m;
        }
      }
      out.push_back(0.5 * (x0 + x1));
    }
    a = b;
    fa = fb;
  }
  return out;
}

// K_nu(z) = int_0^inf cosh(nu t) exp(-z cosh t) dt in quad precision.
inline std::complex<double> bessel_K(std::complex<double> nud, double zd) {
  const Cplx nu(Real(nud.real()), Real(nud.imag()));
  const Real z = zd;
  boost::math::quadrature::exp_sinh<Real> integrator;
  auto part = [&](bool re) {
    return integrator.integrate([&](Real t) -> Real {
      if (t > 20) return 0;
      const Cplx c = cosh(nu * t);
      const Real e = exp(-z * cosh(t));
      return (re ? c.real() : c.imag()) * e;
    }, Real(1e-30));
  };
  return {static_cast<double>(part(true)), static_cast<double>(part(false))};
}

}  // namespace oracle
