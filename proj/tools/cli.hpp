#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <functional>
#include <iosfwd>
#include <map>
#include <mutex>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "xispec/shooting.hpp"
#include "xispec/special_functions.hpp"

namespace xispec::cli {

enum ExitCode : int { kOk = 0, kUsage = 2, kNumeric = 3 };

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Flat "section.key" -> value map. Every key has a default; unknown keys are
/// usage errors.
class Config {
 public:
  Config();

  /// Merges an INI file.
  void load_ini(const std::string& path);
  /// "section.key=value".
  void set(const std::string& assignment);
  void set(const std::string& key, const std::string& value);

  const std::string& get(const std::string& key) const;
  double number(const std::string& key) const;
  long integer(const std::string& key) const;

  /// FNV-1a over the canonical dump, excluding the [run] section.
  std::uint64_t hash() const;
  std::string hash_hex() const;
  const std::map<std::string, std::string>& entries() const { return values_; }

 private:
  std::map<std::string, std::string> values_;
};

struct Settings {
  QuadratureConfig quad;
  ZetaConfig zeta;
  WhittakerConfig whittaker;
  ShootingOptions shooting;
  double kappa = 2.25;
  double z = 0.0;  // 0: the function's own default
  double gamma = 0.0;
  int order = 1;
  std::string policy = "square_only";
  long n_max = 9;
  double zero_step = 0.05;
  double zero_tol = 1e-10;
  double pair_cap = 0.5;
  double figure_step = 0.1;
  double omega_max = 100.0;
  int cusp_nx = 64;
  int cusp_ny = 48;
  double cusp_y_max = 3.0;
  unsigned threads = 1;

  static Settings from(const Config& cfg);
};

/// "start:stop:step" (inclusive, empty when stop < start) or "a,b,c".
std::vector<double> parse_grid(const std::string& spec);
/// "start:stop" or "start:stop:step" for zero scans.
struct Range {
  double lo = 0.0, hi = 0.0;
  double step = 0.0;  // 0: use the configured step
};
Range parse_range(const std::string& spec);

/// Reads "2.5", "pi", "pi/3", "-3*pi/4" and similar.
double parse_real(const std::string& text);

/// 17 significant digits.
std::string fmt(double v);

std::string csv_banner(const Config& cfg);

/// fn(i) for i in [0, n) on a pool of `threads` workers. Results are stored by
/// index; if any call throws, the exception of the lowest failing index is
/// rethrown.
template <class T>
std::vector<T> parallel_map(std::size_t n, unsigned threads, const std::function<T(std::size_t)>& fn);

struct FunctionEntry {
  std::string name;
  std::string argument;  // column name of the grid variable
  std::string value;     // column name of the result
  std::function<double(double, const Settings&)> eval;
  /// Zero finder replacing the generic sign-change scan.
  std::function<std::vector<double>(double, double, double, const Settings&)> zeros;
};

const std::map<std::string, FunctionEntry>& registry();
const FunctionEntry& lookup(const std::string& name);

int cmd_eval(const std::string& name, const std::string& grid, const Config& cfg,
             std::ostream& out);
int cmd_zeros(const std::string& name, const std::string& range, const std::string& against,
              const Config& cfg, std::ostream& out);
int cmd_figure(const std::string& id, const std::string& out_dir, const Config& cfg,
               std::ostream& log);
int cmd_embed(double x, double y, const Config& cfg, std::ostream& out);
int cmd_fluxcheck(double field, double area, const std::vector<double>& strings, long n,
                  const Config& cfg, std::ostream& out);

const std::vector<std::string>& figure_ids();

/// Full command line; output goes to out unless -o is given.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

// ---------------------------------------------------------------------------

template <class T>
std::vector<T> parallel_map(std::size_t n, unsigned threads, const std::function<T(std::size_t)>& fn) {
  std::vector<T> results(n);
  std::vector<std::exception_ptr> errors(n);
  std::size_t next = 0;
  std::mutex lock;
  auto worker = [&] {
    for (;;) {
      std::size_t i;
      {
        std::lock_guard<std::mutex> g(lock);
        if (next >= n) return;
        i = next++;
      }
      try {
        results[i] = fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const unsigned count = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(n)));
  if (count <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < count; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return results;
}

}  // namespace xispec::cli
