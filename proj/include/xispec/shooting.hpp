#pragma once

#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <vector>

#include "xispec/common.hpp"
#include "xispec/linear_ode.hpp"
#include "xispec/semiclassical.hpp"

namespace xispec {

enum class Sidedness { one, two };
enum class Side { right, left };
enum class PotentialTag { exp_one_sided, morse, exp_two_sided, cosh, tzitzeica, custom };

/// H = -d^2/dx^2 + V(x). One-sided potentials live on [0, inf) with a hard
/// wall at 0; two-sided ones on the whole line. V must grow to +inf at every
/// open end.
class PotentialSpec {
 public:
  using Fn = std::function<double(double)>;

  /// 4 pi^2 e^{2x}.
  static PotentialSpec exp_one_sided();
  /// 4 pi^2 e^{2x} - 4 pi kappa e^x + gamma.
  static PotentialSpec morse(double kappa, double gamma);
  /// 4 pi^2 e^{4|x|}.
  static PotentialSpec exp_two_sided();
  /// 8 pi^2 cosh 4x.
  static PotentialSpec cosh();
  /// 4 pi^2 2^{-2/3} (2 e^{3x} + e^{-6x}).
  static PotentialSpec tzitzeica();
  /// Missing derivatives are taken by central differences.
  static PotentialSpec custom(Sidedness sidedness, Fn V, Fn dV = {}, Fn d2V = {});

  PotentialSpec with_reference_energy(double E_ref) const;

  Sidedness sidedness() const { return sidedness_; }
  PotentialTag tag() const { return tag_; }
  double kappa() const { return kappa_; }
  double gamma() const { return gamma_; }
  double reference_energy() const { return reference_energy_; }
  /// 0 for one-sided potentials, -inf otherwise.
  double lower() const {
    return sidedness_ == Sidedness::one ? 0.0 : -std::numeric_limits<double>::infinity();
  }

  /// Points where V' jumps; the integrator stops there.
  const std::vector<double>& kinks() const { return kinks_; }
  PotentialSpec with_kinks(std::vector<double> kinks) const;

  double V(double x) const { return V_(x); }
  double dV(double x) const;
  double d2V(double x) const;

 private:
  Sidedness sidedness_ = Sidedness::one;
  PotentialTag tag_ = PotentialTag::custom;
  double kappa_ = 0.0;
  double gamma_ = 0.0;
  double reference_energy_ = 0.0;
  Fn V_, dV_, d2V_;
  std::vector<double> kinks_;
};

template <class Scalar>
using ShootingState = ode::LinearState<Scalar>;

struct ShootingOptions {
  /// Seed validity: |V'| / |V - E|^{3/2} and |V''| / |V - E|^2 must be below
  /// this at x0. The seed error in log P is of order seed_tol^2.
  double seed_tol = 1e-6;
  /// Forces the seed point; a point failing the validity test raises SeedError.
  std::optional<double> x0;
  ode::Options ode{};
};

/// Start point of the decaying solution on the given side.
template <class Scalar>
double seed_point(const PotentialSpec& pot, Scalar E, Side side, const ShootingOptions& opt = {});

/// Solution decaying towards the given side, normalised so that psi_E / psi_ref -> 1
/// there, where psi_ref ~ (V - E_ref)^{-1/4} exp(-|int_0^x sqrt(V - E_ref)|). The seed
/// at x0 is the second-order LGWKB amplitude; the tail integrals beyond x0 are
/// evaluated by quadrature, so the result does not depend on x0. Between x0 and
/// the point where the well becomes shallow the Riccati form is integrated with
/// an implicit scheme, then (psi, psi') with an explicit one.
template <class Scalar>
std::vector<ShootingState<Scalar>> decaying_solution(const PotentialSpec& pot, Scalar E, Side side,
                                                     const std::vector<double>& stops,
                                                     const ShootingOptions& opt = {});

template <class Scalar>
ShootingState<Scalar> decaying_solution(const PotentialSpec& pot, Scalar E, Side side,
                                        double x_stop, const ShootingOptions& opt = {});

/// P(E) = psi_E^+(0).
template <class Scalar>
Scaled<Scalar> characteristic_one_sided(const PotentialSpec& pot, Scalar E,
                                        const ShootingOptions& opt = {});

/// psi^+ dpsi^- - psi^- dpsi^+ evaluated at x.
template <class Scalar>
Scaled<Scalar> wronskian_at(const PotentialSpec& pot, Scalar E, double x,
                            const ShootingOptions& opt = {});

/// The Wronskian at x = 0.
template <class Scalar>
Scaled<Scalar> characteristic_two_sided(const PotentialSpec& pot, Scalar E,
                                        const ShootingOptions& opt = {});

/// One- or two-sided characteristic function, whichever matches the potential.
Scaled<double> characteristic(const PotentialSpec& pot, double E, const ShootingOptions& opt = {});

/// d/dE log|P| by a five-point stencil of step h.
double characteristic_log_derivative(const PotentialSpec& pot, double E, double h,
                                     const ShootingOptions& opt = {});

/// R(E) ~ -1/(4E) - T(E) (one-sided) or -T(E) (two-sided), E < inf V.
double lgwkb_R(const PotentialSpec& pot, double E);
double lgwkb_R(const WidthFunction& width, double E, Sidedness sidedness);

/// P~(E) for E above the bottom of the well, with Re P~ tracking the shooting
/// function. Requires V >= 0 and a single well.
Scaled<Complex> lgwkb_oscillatory(const PotentialSpec& pot, double E);
Scaled<Complex> lgwkb_oscillatory(const WidthFunction& width, double E, Sidedness sidedness);

/// Sign changes of f on a grid of the given step, refined by bisection to tol.
std::vector<double> find_zeros(const std::function<double(double)>& f, double lo, double hi,
                               double step,
                               std::size_t max_count = std::numeric_limits<std::size_t>::max(),
                               double tol = 1e-10);

enum class Provenance { shooting, closed_form, asymptotic, mode_sum };

struct CharacteristicSamples {
  std::vector<double> E;
  std::vector<double> values;
  Provenance provenance = Provenance::shooting;
};

/// P(E) = C exp(int_{E0}^E R) on the sample grid; E0 must be a grid node.
/// Simple poles of R (zeros of P) between nodes are detected from the local
/// 1/(E - p) shape, or taken from `poles`, and carried as explicit factors.
CharacteristicSamples reconstruct_characteristic(const std::vector<double>& E,
                                                 const std::vector<double>& R, double E0, double C,
                                                 std::vector<double> poles = {});

/// Sampled width function of a single-well potential.
WidthFunction width_from_potential(const PotentialSpec& pot, const std::vector<double>& v);

/// Turning points a_- <= a_+ where V = v (a_- = 0 for one-sided potentials
/// whose wall is below v).
std::pair<double, double> turning_points(const PotentialSpec& pot, double v);

}  // namespace xispec
