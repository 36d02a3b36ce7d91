#pragma once

#include <vector>

#include "xispec/common.hpp"

namespace xispec {

struct QuadratureConfig {
  double truncation_t = 3.0;  // upper limit of t-integrals over Phi
  int series_cutoff = 40;     // n-truncation of the Phi and psi series
  double abs_tol = 1e-15;
  double rel_tol = 1e-12;

  void validate() const;
};

struct ZetaConfig {
  double max_abs_omega = 5000.0;
  int bernoulli_terms = 24;  // Euler-Maclaurin correction terms B_2 .. B_{2M}
};

// --- theta family -----------------------------------------------------------

/// psi(x) = sum_{n>=1} exp(-pi n^2 x), x > 0.
double jacobi_psi(double x, const QuadratureConfig& cfg = {});

/// theta(x) = 1 + 2 psi(x).
double jacobi_theta(double x, const QuadratureConfig& cfg = {});

/// Polya's Phi(t); even in t. Terms whose Gaussian factor underflows are
/// dropped: for t > 3 every term is below 1e-500 relative to Phi(0).
double phi(double t, const QuadratureConfig& cfg = {});

// --- xi ---------------------------------------------------------------------

/// xi(omega) = 2 int_0^T cos(omega t) Phi(t) dt by adaptive Gauss-Kronrod.
Complex xi_fourier(Complex omega, const QuadratureConfig& cfg = {});

/// zeta(1/2 + i omega) by Euler-Maclaurin summation.
Complex zeta_critical(double omega, const ZetaConfig& cfg = {});

/// zeta(s) for general s != 1 (Euler-Maclaurin).
Complex zeta(Complex s, const ZetaConfig& cfg = {});

/// (s - 1) zeta(s): entire, finite at s = 1.
Complex zeta_times_sm1(Complex s, const ZetaConfig& cfg = {});

/// log xi(omega) via the zeta/Gamma product; evaluated at whichever of
/// +-omega has Re(1/2 + i omega) >= 1/2, so it never meets a Gamma pole.
Complex log_xi_zeta(Complex omega, const ZetaConfig& cfg = {});

Complex xi_zeta(Complex omega, const ZetaConfig& cfg = {});

/// S(omega) * xi(omega) computed in the log domain (real omega).
double scaled_xi(double omega, const ZetaConfig& cfg = {});

// --- factorisation xi = -f Z and the scale S ---------------------------------

double prefactor_f(double omega);
double log_prefactor_f(double omega);
double big_Z(double omega, const ZetaConfig& cfg = {});
double scaling_S(double omega);
double log_scaling_S(double omega);

/// Riemann-Siegel theta: arg Gamma(1/4 + i w/2) - (w/2) log pi, continuous.
double siegel_theta(double omega);

// --- Gamma family -----------------------------------------------------------

/// Principal branch of log Gamma (continuous off the negative real axis).
Complex log_gamma(Complex z);
Complex digamma(Complex z);

// --- Bessel K, Whittaker W --------------------------------------------------

/// K_nu(z) for complex order and real z > 0, from
/// K_nu(z) = 1/2 int_R exp(nu t - z cosh t) dt on a contour shifted towards
/// Im t = pi/2 so that purely imaginary orders do not cancel catastrophically.
Complex bessel_K(Complex nu, double z);
Scaled<Complex> bessel_K_scaled(Complex nu, double z);

/// dK_nu/dz = -(K_{nu-1} + K_{nu+1}) / 2.
Complex bessel_K_derivative(Complex nu, double z);

struct WhittakerConfig {
  double min_seed = 40.0;       // z0 = max(min_seed, seed_factor * |mu|^2)
  double seed_factor = 4.0;
  double seed_override = 0.0;   // > 0 forces z0
  int max_series_terms = 400;
  double series_tol = 1e-15;    // smallest asymptotic term accepted at z0
  double rel_tol = 1e-13;       // ODE step tolerance
  double abs_tol = 1e-13;
};

/// Whittaker W_{kappa,mu}(z), z > 0: inward ODE integration from an
/// asymptotic-series seed at z0 >> |mu|^2.
Complex whittaker_W(double kappa, Complex mu, double z, const WhittakerConfig& cfg = {});
Scaled<Complex> whittaker_W_scaled(double kappa, Complex mu, double z,
                                   const WhittakerConfig& cfg = {});

/// W_{kappa,mu} and its z-derivative at several z in one inward sweep.
struct WhittakerSample {
  double z;
  Scaled<Complex> value;
  Scaled<Complex> derivative;
};
std::vector<WhittakerSample> whittaker_W_profile(double kappa, Complex mu, std::vector<double> zs,
                                                 const WhittakerConfig& cfg = {});

/// Polya's fake xi: order 1 is 4 pi^2 (K_{iw/2+9/4} + K_{iw/2-9/4})(2 pi);
/// order 2 adds -6 pi (K_{iw/2+5/4} + K_{iw/2-5/4})(2 pi).
double polya_fake_xi(double omega, int order);

}  // namespace xispec
