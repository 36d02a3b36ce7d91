#pragma once

#include <array>
#include <map>
#include <string>
#include <vector>

#include "xispec/common.hpp"

namespace xispec {

/// Coefficients a_n of the cusp expansion. Base values come from the
/// square_only rule (a_{N^2} = N^{-3/2}, zero elsewhere) or a table; negative n
/// may carry an omega-dependent part A + B w^2 + C w^4 on top.
class CoefficientPolicy {
 public:
  enum class Rule { square_only, custom };
  struct Augmentation {
    double A = 0.0, B = 0.0, C = 0.0;
  };

  static CoefficientPolicy square_only();
  static CoefficientPolicy custom(std::map<long, double> table);
  /// "square_only" or "custom", then comma-separated "n=a" table entries and
  /// "n~A/B/C" augmentations, e.g. "custom,1=1,4=0.125,-1~0/0/1e-6".
  static CoefficientPolicy parse(const std::string& text);

  /// Only n < 0 may be augmented.
  CoefficientPolicy with_augmentation(long n, Augmentation aug) const;

  Rule rule() const { return rule_; }
  double value(long n) const;
  double coefficient(long n, double omega) const;
  /// Indices with |n| <= n_max whose coefficient can be nonzero, ascending.
  std::vector<long> support(long n_max) const;

 private:
  Rule rule_ = Rule::square_only;
  std::map<long, double> table_;
  std::map<long, Augmentation> aug_;
};

/// e^{2 pi i n x} W_{sgn(n) 9/4, i w/2}(4 pi |n| y): a decaying, 1-periodic
/// solution of (Delta_{9/4} - 85/16) psi = (w^2/4) psi.
Complex cusp_mode(long n, double omega, double x, double y);

/// sum_n a_n W_{sgn(n) 9/4, i w/2}(4 pi |n|) over 0 < |n| <= n_max: the mode sum
/// at z = i. The imaginary part is rounding only.
Complex characteristic_sum(const CoefficientPolicy& policy, double omega, long n_max);

/// S(w) * characteristic_sum, with S applied in the log domain.
double scaled_characteristic_sum(const CoefficientPolicy& policy, double omega, long n_max);

/// psi sampled at (x0 + i dx, y0 + j dy), row-major in y.
struct CuspGrid {
  double x0 = 0.0, dx = 0.0;
  int nx = 0;
  double y0 = 0.0, dy = 0.0;
  int ny = 0;
  std::vector<Complex> psi;

  Complex& at(int i, int j) { return psi[static_cast<std::size_t>(j) * nx + i]; }
  const Complex& at(int i, int j) const { return psi[static_cast<std::size_t>(j) * nx + i]; }
  /// True when the x samples cover exactly one period.
  bool periodic_x() const { return std::abs(nx * dx - 1.0) < 1e-12; }
};

struct ModeTerm {
  long n;
  Complex a;
};

/// Sum of modes on a grid; y-profiles come from one Whittaker sweep per mode.
CuspGrid sample_modes(const std::vector<ModeTerm>& modes, double omega, double x0, double dx,
                      int nx, double y0, double dy, int ny);

struct Residual {
  double max_abs = 0.0;
  /// max_abs over the largest sum of term magnitudes in the operator.
  double relative = 0.0;
};

/// Fourth-order finite-difference residual of (Delta_{9/4} - 85/16 - w^2/4) psi,
/// Delta_{9/4} = -y^2 (d_y^2 + d_x^2) + (9/2) i y d_x + 81/16. Interior points
/// only in y; x wraps when the grid is periodic. Needs dy <= y0 / w.
Residual magnetic_laplacian_residual(const CuspGrid& grid, double omega);

struct WhittakerAsymptotic {
  double amplitude = 0.0;  // e^{-pi w/4} (w/2)^{kappa - 1/2} sqrt(2Y)
  double phase = 0.0;      // (w/2) log(2w / (Y e)) + (kappa - 1/2) pi/2
  double value = 0.0;
  double omega_over_Y = 0.0;
  bool in_window = false;  // omega >= 4 Y, a heuristic
};

/// Large-omega form of W_{kappa, i w/2}(Y).
WhittakerAsymptotic whittaker_asymptotic(double kappa, double omega, double Y);

/// field * area - sum(strings), reduced to (-pi, pi].
double flux_check(double field, double area, const std::vector<double>& strings);

/// Index nu with exp(-2 pi i nu) = exp(i phase) continuing n, i.e. n - phase / 2 pi,
/// for psi(z + 1) = exp(i phase) psi(z) in the exp(-2 pi i n x) labelling.
double flux_shifted_expansion(double phase, long n);

/// -(-z / conj z)^{9/4}: psi(-1/z) = factor(z) psi(z) under a flux string of
/// strength pi at z = i.
Complex flux_symmetry_factor(Complex z);

struct CuspPoint {
  double x = 0.0;
  double y = 1.0;
};

/// Isometric embedding of {y >= 1/2pi} / (x ~ x + 1) into R^3.
std::array<double, 3> cusp_embedding(const CuspPoint& p);

}  // namespace xispec
