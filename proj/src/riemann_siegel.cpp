#include "xispec/riemann_siegel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "xispec/shooting.hpp"
#include "xispec/special_functions.hpp"

namespace xispec {

namespace {
const double kLogPi = std::log(kPi);
}

double rs_phase(double omega) {
  if (!std::isfinite(omega)) throw DomainError("rs_phase: non-finite omega");
  return log_gamma({0.25, 0.5 * omega}).imag();
}

int rs_term_count(double omega) {
  if (!(omega > 0.0)) return 0;
  auto edge = [](long n) { return 2.0 * kPi * static_cast<double>(n) * static_cast<double>(n); };
  long n = static_cast<long>(std::floor(std::sqrt(omega / (2.0 * kPi))));
  while (n > 0 && edge(n) >= omega) --n;
  while (edge(n + 1) < omega) ++n;
  return static_cast<int>(n);
}

namespace {

double main_sum_terms(double omega, int terms) {
  const double arg0 = rs_phase(omega) - 0.5 * omega * kLogPi + kPi;
  double sum = 0.0;
  for (int N = 1; N <= terms; ++N)
    sum += std::cos(arg0 - omega * std::log(static_cast<double>(N))) / std::sqrt(static_cast<double>(N));
  return 2.0 * sum;
}

}  // namespace

double rs_main_sum(double omega) {
  if (!std::isfinite(omega)) throw DomainError("rs_main_sum: non-finite omega");
  return main_sum_terms(omega, rs_term_count(omega));
}

std::vector<double> rs_zeros(double lo, double hi, double step) {
  if (!(hi > lo)) throw ValidationError("rs_zeros: need lo < hi");
  std::vector<double> out;
  double a = lo;
  while (a < hi) {
    // Segment [a, b] where the term count is that of the open interval.
    const int terms = rs_term_count(std::nextafter(a, hi));
    const double next_edge = 2.0 * kPi * (terms + 1.0) * (terms + 1.0);
    const double b = std::min(hi, next_edge);
    const auto z = find_zeros([terms](double w) { return main_sum_terms(w, terms); }, a, b,
                              std::min(step, b - a));
    for (double x : z)
      if (out.empty() || x - out.back() > 1e-9) out.push_back(x);
    // Sign change across the jump itself.
    if (b < hi && main_sum_terms(b, terms) * main_sum_terms(b, terms + 1) < 0.0 &&
        (out.empty() || b - out.back() > 1e-9))
      out.push_back(b);
    a = b;
  }
  return out;
}

std::vector<ZeroPair> pair_zeros(const std::vector<double>& reference,
                                 const std::vector<double>& candidates, double cap,
                                 std::vector<double>* unpaired) {
  struct Link {
    double d;
    std::size_t r, c;
  };
  std::vector<Link> links;
  for (std::size_t r = 0; r < reference.size(); ++r)
    for (std::size_t c = 0; c < candidates.size(); ++c) {
      const double d = std::abs(reference[r] - candidates[c]);
      if (d <= cap) links.push_back({d, r, c});
    }
  std::sort(links.begin(), links.end(), [](const Link& x, const Link& y) { return x.d < y.d; });
  std::vector<ZeroPair> pairs(reference.size());
  for (std::size_t r = 0; r < reference.size(); ++r) pairs[r].reference = reference[r];
  std::vector<bool> used(candidates.size(), false);
  for (const auto& l : links) {
    if (pairs[l.r].partner || used[l.c]) continue;
    pairs[l.r].partner = candidates[l.c];
    pairs[l.r].displacement = l.d;
    used[l.c] = true;
  }
  if (unpaired) {
    unpaired->clear();
    for (std::size_t c = 0; c < candidates.size(); ++c)
      if (!used[c]) unpaired->push_back(candidates[c]);
  }
  return pairs;
}

RsComparison rs_compare(const std::vector<double>& omega, double zero_step, double pair_cap) {
  if (omega.size() < 2) throw ValidationError("rs_compare: grid needs at least two points");
  if (omega.front() < 2.0 * kPi - 1e-12)
    throw ValidationError("rs_compare: grid must start at or above 2 pi");
  for (std::size_t i = 1; i < omega.size(); ++i)
    if (!(omega[i] > omega[i - 1])) throw ValidationError("rs_compare: grid must increase");

  RsComparison out;
  out.omega = omega;
  for (double w : omega) {
    out.s_xi.push_back(scaled_xi(w));
    out.rs.push_back(rs_main_sum(w));
  }
  const double lo = omega.front(), hi = omega.back();
  out.reference_zeros = find_zeros([](double w) { return big_Z(w); }, lo, hi, zero_step);
  out.rs_zeros = rs_zeros(lo, hi, zero_step);
  out.pairs = pair_zeros(out.reference_zeros, out.rs_zeros, pair_cap, &out.unpaired_rs);
  for (const auto& p : out.pairs)
    out.max_displacement = p.partner ? std::max(out.max_displacement, p.displacement)
                                     : std::numeric_limits<double>::infinity();
  return out;
}

}  // namespace xispec
