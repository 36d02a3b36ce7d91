#pragma once

#include <optional>
#include <vector>

#include "xispec/common.hpp"

namespace xispec {

/// arg Gamma(1/4 + i omega / 2) on the continuous branch through arg Gamma(1/4) = 0.
double rs_phase(double omega);

/// Number of terms N with 1 <= N < sqrt(omega / 2 pi).
int rs_term_count(double omega);

/// Main sum 2 sum_N N^{-1/2} cos(rs_phase(omega) - (omega/2) log(pi N^2) + pi),
/// an approximation to -Z(omega) without the remainder. Jumps at omega = 2 pi N^2;
/// at the jump itself the new term is not yet included.
double rs_main_sum(double omega);

/// Sign changes of rs_main_sum on [lo, hi]. Each interval between jumps is
/// scanned separately; a jump that crosses zero is reported at 2 pi N^2.
std::vector<double> rs_zeros(double lo, double hi, double step = 0.05);

struct ZeroPair {
  double reference;
  std::optional<double> partner;
  double displacement = 0.0;  // |partner - reference| when paired
};

struct RsComparison {
  std::vector<double> omega;
  std::vector<double> s_xi;
  std::vector<double> rs;
  std::vector<double> reference_zeros;  // zeros of Z
  std::vector<double> rs_zeros;
  std::vector<ZeroPair> pairs;  // one per reference zero
  std::vector<double> unpaired_rs;
  double max_displacement = 0.0;  // over paired zeros; inf if any reference zero is unpaired
};

/// Pairs zeros one to one by increasing distance, never farther than cap.
std::vector<ZeroPair> pair_zeros(const std::vector<double>& reference,
                                 const std::vector<double>& candidates, double cap,
                                 std::vector<double>* unpaired = nullptr);

/// S xi and the main sum on the grid, and the zero comparison over the grid's
/// range. The grid must be increasing and start at or above 2 pi.
RsComparison rs_compare(const std::vector<double>& omega, double zero_step = 0.05,
                        double pair_cap = 0.5);

}  // namespace xispec
