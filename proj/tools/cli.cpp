#include "cli.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numeric>
#include <ostream>
#include <sstream>

#include "xispec/cusp_model.hpp"
#include "xispec/riemann_siegel.hpp"
#include "xispec/semiclassical.hpp"

namespace xispec::cli {

namespace {

enum class Kind { real, integer, text };

struct KeySpec {
  const char* key;
  const char* value;
  Kind kind;
};

// clang-format off
const KeySpec kKeys[] = {
    {"quadrature.truncation_t",     "3",           Kind::real},
    {"quadrature.series_cutoff",    "40",          Kind::integer},
    {"quadrature.abs_tol",          "1e-15",       Kind::real},
    {"quadrature.rel_tol",          "1e-12",       Kind::real},
    {"zeta.max_abs_omega",          "5000",        Kind::real},
    {"zeta.bernoulli_terms",        "24",          Kind::integer},
    {"whittaker.min_seed",          "40",          Kind::real},
    {"whittaker.seed_factor",       "4",           Kind::real},
    {"whittaker.seed_override",     "0",           Kind::real},
    {"whittaker.max_series_terms",  "400",         Kind::integer},
    {"whittaker.series_tol",        "1e-15",       Kind::real},
    {"whittaker.rel_tol",           "1e-13",       Kind::real},
    {"whittaker.abs_tol",           "1e-13",       Kind::real},
    {"shooting.seed_tol",           "1e-6",        Kind::real},
    {"shooting.rel_tol",            "1e-12",       Kind::real},
    {"eval.kappa",                  "2.25",        Kind::real},
    {"eval.z",                      "0",           Kind::real},
    {"eval.gamma",                  "0",           Kind::real},
    {"eval.order",                  "1",           Kind::integer},
    {"cusp.policy",                 "square_only", Kind::text},
    {"cusp.n_max",                  "9",           Kind::integer},
    {"zeros.step",                  "0.05",        Kind::real},
    {"zeros.tol",                   "1e-10",       Kind::real},
    {"zeros.pair_cap",              "0.5",         Kind::real},
    {"figure.step",                 "0.1",         Kind::real},
    {"figure.omega_max",            "100",         Kind::real},
    {"figure.cusp_nx",              "64",          Kind::integer},
    {"figure.cusp_ny",              "48",          Kind::integer},
    {"figure.cusp_y_max",           "3",           Kind::real},
    {"run.threads",                 "0",           Kind::integer},
};
// clang-format on

const KeySpec& spec_of(const std::string& key) {
  for (const auto& k : kKeys)
    if (key == k.key) return k;
  throw UsageError("unknown config key '" + key + "'");
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double plain_number(const std::string& s) {
  std::size_t pos = 0;
  double v;
  try {
    v = std::stod(s, &pos);
  } catch (const std::exception&) {
    throw UsageError("not a number: '" + s + "'");
  }
  if (pos != s.size()) throw UsageError("not a number: '" + s + "'");
  return v;
}

std::string canonical(const KeySpec& k, const std::string& raw) {
  const std::string v = trim(raw);
  switch (k.kind) {
    case Kind::real:
      return fmt(parse_real(v));
    case Kind::integer: {
      const double d = plain_number(v);
      if (d != std::floor(d) || std::abs(d) > 1e15)
        throw UsageError(std::string(k.key) + ": expected an integer, got '" + v + "'");
      return std::to_string(static_cast<long>(d));
    }
    case Kind::text:
      return v;
  }
  return v;
}

std::vector<double> make_grid(double start, double stop, double step) {
  if (!(step > 0.0) || !std::isfinite(start) || !std::isfinite(stop))
    throw UsageError("grid needs finite bounds and a positive step");
  std::vector<double> g;
  if (stop < start) return g;
  const auto n = static_cast<long>(std::floor((stop - start) / step + 1e-9)) + 1;
  g.reserve(static_cast<std::size_t>(n));
  for (long i = 0; i < n; ++i) g.push_back(start + static_cast<double>(i) * step);
  return g;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) parts.push_back(trim(item));
  if (!s.empty() && s.back() == sep) parts.emplace_back();
  return parts;
}

double z_or(const Settings& s, double fallback) { return s.z > 0.0 ? s.z : fallback; }

double shoot(const PotentialSpec& pot, double omega, const Settings& s) {
  return characteristic(pot, 0.25 * omega * omega, s.shooting).value();
}

std::map<std::string, FunctionEntry> build_registry() {
  std::map<std::string, FunctionEntry> r;
  auto add = [&r](FunctionEntry e) { r.emplace(e.name, std::move(e)); };
  const Complex I{0.0, 1.0};

  add({"xi", "omega", "xi",
       [](double w, const Settings& s) { return xi_zeta(w, s.zeta).real(); }, {}});
  add({"xi_fourier", "omega", "xi",
       [](double w, const Settings& s) { return xi_fourier(w, s.quad).real(); }, {}});
  add({"Sxi", "omega", "S_xi", [](double w, const Settings& s) { return scaled_xi(w, s.zeta); }, {}});
  add({"Z", "omega", "Z", [](double w, const Settings& s) { return big_Z(w, s.zeta); }, {}});
  add({"S", "omega", "S", [](double w, const Settings&) { return scaling_S(w); }, {}});
  add({"K", "omega", "K",
       [I](double w, const Settings& s) { return bessel_K(0.5 * w * I, z_or(s, kTwoPi)).real(); },
       {}});
  add({"W", "omega", "W",
       [I](double w, const Settings& s) {
         return whittaker_W(s.kappa, 0.5 * w * I, z_or(s, 2.0 * kTwoPi), s.whittaker).real();
       },
       {}});
  add({"phi", "t", "phi", [](double t, const Settings& s) { return phi(t, s.quad); }, {}});
  add({"psi", "x", "psi", [](double x, const Settings& s) { return jacobi_psi(x, s.quad); }, {}});
  add({"theta", "x", "theta",
       [](double x, const Settings& s) { return jacobi_theta(x, s.quad); }, {}});
  add({"polyafake", "omega", "xi_star",
       [](double w, const Settings& s) { return polya_fake_xi(w, s.order); }, {}});
  add({"rs", "omega", "rs", [](double w, const Settings&) { return rs_main_sum(w); },
       [](double lo, double hi, double step, const Settings&) {
         lo = std::max(lo, kTwoPi);
         return hi > lo ? rs_zeros(lo, hi, step) : std::vector<double>{};
       }});
  add({"sumw", "omega", "sumw",
       [](double w, const Settings& s) {
         return characteristic_sum(CoefficientPolicy::parse(s.policy), w, s.n_max).real();
       },
       {}});
  add({"Ssumw", "omega", "S_sumw",
       [](double w, const Settings& s) {
         return scaled_characteristic_sum(CoefficientPolicy::parse(s.policy), w, s.n_max);
       },
       {}});
  add({"exp_shoot", "omega", "P",
       [](double w, const Settings& s) { return shoot(PotentialSpec::exp_one_sided(), w, s); }, {}});
  add({"morse_shoot", "omega", "P",
       [](double w, const Settings& s) {
         return shoot(PotentialSpec::morse(s.kappa, s.gamma), w, s);
       },
       {}});
  add({"count", "Omega", "N", [](double w, const Settings&) { return riemann_count(w); }, {}});
  return r;
}

void banner_to(std::ostream& out, const Config& cfg) { out << csv_banner(cfg) << '\n'; }

}  // namespace

// ------------------------------------------------------------------- config

Config::Config() {
  for (const auto& k : kKeys) values_[k.key] = canonical(k, k.value);
}

void Config::set(const std::string& key, const std::string& value) {
  values_[key] = canonical(spec_of(key), value);
}

void Config::set(const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos) throw UsageError("expected section.key=value, got '" + assignment + "'");
  set(trim(assignment.substr(0, eq)), assignment.substr(eq + 1));
}

void Config::load_ini(const std::string& path) {
  boost::property_tree::ptree tree;
  try {
    boost::property_tree::ini_parser::read_ini(path, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw UsageError("config: " + std::string(e.what()));
  }
  for (const auto& [section, body] : tree) {
    if (body.empty()) throw UsageError("config: key '" + section + "' outside a section");
    for (const auto& [key, leaf] : body) {
      // Trailing "; comment" is not stripped by the INI reader.
      auto v = leaf.get_value<std::string>();
      v = v.substr(0, v.find_first_of(";#"));
      set(section + "." + key, v);
    }
  }
}

const std::string& Config::get(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) throw UsageError("unknown config key '" + key + "'");
  return it->second;
}

double Config::number(const std::string& key) const { return plain_number(get(key)); }
long Config::integer(const std::string& key) const { return std::stol(get(key)); }

std::uint64_t Config::hash() const {
  std::uint64_t h = 14695981039346656037ull;
  for (const auto& [k, v] : values_) {
    if (k.rfind("run.", 0) == 0) continue;
    for (const char c : k + "=" + v + "\n") {
      h ^= static_cast<unsigned char>(c);
      h *= 1099511628211ull;
    }
  }
  return h;
}

std::string Config::hash_hex() const {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(hash()));
  return buf;
}

Settings Settings::from(const Config& c) {
  Settings s;
  s.quad.truncation_t = c.number("quadrature.truncation_t");
  s.quad.series_cutoff = static_cast<int>(c.integer("quadrature.series_cutoff"));
  s.quad.abs_tol = c.number("quadrature.abs_tol");
  s.quad.rel_tol = c.number("quadrature.rel_tol");
  s.zeta.max_abs_omega = c.number("zeta.max_abs_omega");
  s.zeta.bernoulli_terms = static_cast<int>(c.integer("zeta.bernoulli_terms"));
  s.whittaker.min_seed = c.number("whittaker.min_seed");
  s.whittaker.seed_factor = c.number("whittaker.seed_factor");
  s.whittaker.seed_override = c.number("whittaker.seed_override");
  s.whittaker.max_series_terms = static_cast<int>(c.integer("whittaker.max_series_terms"));
  s.whittaker.series_tol = c.number("whittaker.series_tol");
  s.whittaker.rel_tol = c.number("whittaker.rel_tol");
  s.whittaker.abs_tol = c.number("whittaker.abs_tol");
  s.shooting.seed_tol = c.number("shooting.seed_tol");
  s.shooting.ode.rel_tol = c.number("shooting.rel_tol");
  s.kappa = c.number("eval.kappa");
  s.z = c.number("eval.z");
  s.gamma = c.number("eval.gamma");
  s.order = static_cast<int>(c.integer("eval.order"));
  s.policy = c.get("cusp.policy");
  s.n_max = c.integer("cusp.n_max");
  s.zero_step = c.number("zeros.step");
  s.zero_tol = c.number("zeros.tol");
  s.pair_cap = c.number("zeros.pair_cap");
  s.figure_step = c.number("figure.step");
  s.omega_max = c.number("figure.omega_max");
  s.cusp_nx = static_cast<int>(c.integer("figure.cusp_nx"));
  s.cusp_ny = static_cast<int>(c.integer("figure.cusp_ny"));
  s.cusp_y_max = c.number("figure.cusp_y_max");
  const long t = c.integer("run.threads");
  if (t < 0) throw UsageError("run.threads must be >= 0");
  s.threads = t > 0 ? static_cast<unsigned>(t) : std::max(1u, std::thread::hardware_concurrency());
  if (!(s.zero_step > 0.0) || !(s.figure_step > 0.0) || !(s.zero_tol > 0.0))
    throw UsageError("steps and tolerances must be positive");
  if (s.cusp_nx < 2 || s.cusp_ny < 2) throw UsageError("cusp mesh needs at least 2x2 points");
  try {
    CoefficientPolicy::parse(s.policy);
  } catch (const ValidationError& e) {
    throw UsageError(std::string("cusp.policy: ") + e.what());
  }
  return s;
}

// --------------------------------------------------------------- formatting

double parse_real(const std::string& text) {
  const std::string s = trim(text);
  const auto slash = s.find('/');
  const std::string num = trim(s.substr(0, slash));
  double v;
  const auto p = num.find("pi");
  if (p == std::string::npos) {
    v = plain_number(num);
  } else {
    if (!trim(num.substr(p + 2)).empty()) throw UsageError("not a number: '" + s + "'");
    std::string head = trim(num.substr(0, p));
    if (!head.empty() && head.back() == '*') head = trim(head.substr(0, head.size() - 1));
    const double scale = head == "-" ? -1.0 : (head.empty() || head == "+") ? 1.0 : plain_number(head);
    v = scale * kPi;
  }
  if (slash != std::string::npos) v /= plain_number(trim(s.substr(slash + 1)));
  return v;
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string csv_banner(const Config& cfg) {
  return "# generated-by xispec, config-hash " + cfg.hash_hex();
}

std::vector<double> parse_grid(const std::string& spec) {
  const std::string s = trim(spec);
  if (s.empty()) throw UsageError("empty grid");
  if (s.find(':') != std::string::npos) {
    const auto parts = split(s, ':');
    if (parts.size() != 3) throw UsageError("grid must be start:stop:step, got '" + s + "'");
    return make_grid(parse_real(parts[0]), parse_real(parts[1]), parse_real(parts[2]));
  }
  std::vector<double> g;
  for (const auto& p : split(s, ',')) g.push_back(parse_real(p));
  return g;
}

Range parse_range(const std::string& spec) {
  const auto parts = split(trim(spec), ':');
  if (parts.size() != 2 && parts.size() != 3)
    throw UsageError("range must be start:stop or start:stop:step, got '" + spec + "'");
  Range r{parse_real(parts[0]), parse_real(parts[1]), 0.0};
  if (parts.size() == 3) {
    r.step = parse_real(parts[2]);
    if (!(r.step > 0.0)) throw UsageError("range step must be positive");
  }
  if (!std::isfinite(r.lo) || !std::isfinite(r.hi)) throw UsageError("range bounds must be finite");
  return r;
}

// ----------------------------------------------------------------- registry

const std::map<std::string, FunctionEntry>& registry() {
  static const auto r = build_registry();
  return r;
}

const FunctionEntry& lookup(const std::string& name) {
  const auto& r = registry();
  const auto it = r.find(name);
  if (it == r.end()) throw UsageError("unknown function '" + name + "'");
  return it->second;
}

// ----------------------------------------------------------------- commands

int cmd_eval(const std::string& name, const std::string& grid, const Config& cfg,
             std::ostream& out) {
  const auto& f = lookup(name);
  const auto s = Settings::from(cfg);
  const auto xs = parse_grid(grid);
  const auto ys = parallel_map<double>(xs.size(), s.threads, [&](std::size_t i) {
    return require_finite(f.eval(xs[i], s), name.c_str());
  });
  banner_to(out, cfg);
  out << f.argument << ',' << f.value << '\n';
  for (std::size_t i = 0; i < xs.size(); ++i) out << fmt(xs[i]) << ',' << fmt(ys[i]) << '\n';
  return kOk;
}

namespace {

std::vector<double> zeros_of(const FunctionEntry& f, const Range& r, const Settings& s) {
  if (!(r.hi > r.lo)) return {};
  const double step = r.step > 0.0 ? r.step : s.zero_step;
  if (f.zeros) return f.zeros(r.lo, r.hi, step, s);
  return find_zeros([&](double x) { return f.eval(x, s); }, r.lo, r.hi, step,
                    std::numeric_limits<std::size_t>::max(), s.zero_tol);
}

}  // namespace

int cmd_zeros(const std::string& name, const std::string& range, const std::string& against,
              const Config& cfg, std::ostream& out) {
  const auto& f = lookup(name);
  const FunctionEntry* g = against.empty() ? nullptr : &lookup(against);
  const auto s = Settings::from(cfg);
  const auto r = parse_range(range);

  // The two scans are independent.
  const auto lists = parallel_map<std::vector<double>>(g ? 2 : 1, s.threads, [&](std::size_t i) {
    return zeros_of(i == 0 ? f : *g, r, s);
  });
  const auto& zs = lists[0];

  banner_to(out, cfg);
  if (!g) {
    out << "index," << f.argument << '\n';
    for (std::size_t i = 0; i < zs.size(); ++i) out << i << ',' << fmt(zs[i]) << '\n';
    return kOk;
  }

  std::vector<double> unpaired;
  const auto pairs = pair_zeros(zs, lists[1], s.pair_cap, &unpaired);
  out << "index," << name << ',' << against << ",displacement\n";
  std::size_t matched = 0;
  double max_d = 0.0, sum_d = 0.0;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const auto& p = pairs[i];
    out << i << ',' << fmt(p.reference) << ',';
    if (p.partner) {
      out << fmt(*p.partner) << ',' << fmt(p.displacement);
      ++matched;
      max_d = std::max(max_d, p.displacement);
      sum_d += p.displacement;
    } else {
      out << ',';
    }
    out << '\n';
  }
  out << "# matched " << matched << " of " << pairs.size() << ", max-displacement "
      << (matched ? fmt(max_d) : "none") << ", mean-displacement "
      << (matched ? fmt(sum_d / static_cast<double>(matched)) : "none") << '\n';
  out << "# unpaired " << against << ':';
  for (double u : unpaired) out << ' ' << fmt(u);
  out << '\n';
  return kOk;
}

const std::vector<std::string>& figure_ids() {
  static const std::vector<std::string> ids{"xiK", "xiW", "polyafake", "rs", "sumw", "cusp"};
  return ids;
}

namespace {

using Row = std::vector<double>;

void write_table(const std::string& path, const Config& cfg, const std::vector<std::string>& notes,
                 const std::string& header, const std::vector<Row>& rows) {
  std::ofstream f(path);
  if (!f) throw UsageError("cannot write '" + path + "'");
  banner_to(f, cfg);
  for (const auto& n : notes) f << "# " << n << '\n';
  f << header << '\n';
  for (const auto& row : rows) {
    for (std::size_t k = 0; k < row.size(); ++k) f << (k ? "," : "") << fmt(row[k]);
    f << '\n';
  }
}

// omega, S xi, S g for the figures comparing xi with one other function.
std::vector<Row> versus_xi(const Settings& s, const std::function<double(double)>& scaled_other) {
  const auto grid = make_grid(0.0, s.omega_max, s.figure_step);
  return parallel_map<Row>(grid.size(), s.threads, [&](std::size_t i) {
    const double w = grid[i];
    return Row{w, scaled_xi(w, s.zeta), require_finite(scaled_other(w), "figure")};
  });
}

}  // namespace

int cmd_figure(const std::string& id, const std::string& out_dir, const Config& cfg,
               std::ostream& log) {
  const auto& ids = figure_ids();
  if (std::find(ids.begin(), ids.end(), id) == ids.end())
    throw UsageError("unknown figure '" + id + "'");
  const auto s = Settings::from(cfg);
  std::filesystem::create_directories(out_dir);
  const std::string path = (std::filesystem::path(out_dir) / (id + (id == "cusp" ? ".xyz" : ".csv"))).string();
  const Complex I{0.0, 1.0};

  if (id == "xiK") {
    // Makes the two curves agree at omega = 0.
    const double c = xi_zeta(0.0, s.zeta).real() / bessel_K(0.0, kTwoPi).real();
    const auto rows = versus_xi(s, [&](double w) {
      return c * std::exp(log_scaling_S(w)) * bessel_K(0.5 * w * I, kTwoPi).real();
    });
    write_table(path, cfg, {"matching-constant " + fmt(c)}, "omega,S_xi,c_S_K", rows);
  } else if (id == "xiW") {
    const auto rows = versus_xi(s, [&](double w) {
      const auto v = whittaker_W_scaled(2.25, 0.5 * w * I, 2.0 * kTwoPi, s.whittaker);
      return v.mantissa.real() * std::exp(v.log_scale + log_scaling_S(w));
    });
    write_table(path, cfg, {}, "omega,S_xi,S_W", rows);
  } else if (id == "polyafake") {
    const auto rows = versus_xi(s, [](double w) { return scaling_S(w) * polya_fake_xi(w, 1); });
    write_table(path, cfg, {}, "omega,S_xi,S_xi_star", rows);
  } else if (id == "sumw") {
    const auto policy = CoefficientPolicy::parse(s.policy);
    const auto rows =
        versus_xi(s, [&](double w) { return scaled_characteristic_sum(policy, w, s.n_max); });
    write_table(path, cfg, {"policy " + s.policy + ", n_max " + std::to_string(s.n_max)},
                "omega,S_xi,S_sumw", rows);
  } else if (id == "rs") {
    const auto grid = make_grid(kTwoPi, s.omega_max, s.figure_step);
    const auto cmp = rs_compare(grid, s.zero_step, s.pair_cap);
    std::vector<Row> rows;
    for (std::size_t i = 0; i < grid.size(); ++i) rows.push_back({cmp.omega[i], cmp.s_xi[i], cmp.rs[i]});
    write_table(path, cfg, {"max-zero-displacement " + fmt(cmp.max_displacement)},
                "omega,S_xi,rs", rows);
  } else {
    const double t_max = kTwoPi * s.cusp_y_max;
    if (!(t_max > 1.0)) throw UsageError("figure.cusp_y_max must exceed 1/2pi");
    const int nx = s.cusp_nx, ny = s.cusp_ny;
    std::ofstream f(path);
    if (!f) throw UsageError("cannot write '" + path + "'");
    banner_to(f, cfg);
    const auto top = cusp_embedding({0.0, 1.0});
    f << "# image of z = i: " << fmt(top[0]) << ' ' << fmt(top[1]) << ' ' << fmt(top[2]) << '\n';
    f << "# " << ny << " rings of " << nx + 1 << " points, x y z\n";
    for (int j = 0; j < ny; ++j) {
      const double t = 1.0 + (t_max - 1.0) * j / (ny - 1);
      double y = t / kTwoPi;
      if (kTwoPi * y < 1.0) y = std::nextafter(y, 1.0);
      for (int i = 0; i <= nx; ++i) {
        const auto p = cusp_embedding({static_cast<double>(i) / nx, y});
        f << fmt(p[0]) << ' ' << fmt(p[1]) << ' ' << fmt(p[2]) << '\n';
      }
    }
  }
  log << path << '\n';
  return kOk;
}

int cmd_embed(double x, double y, const Config& cfg, std::ostream& out) {
  const auto p = cusp_embedding({x, y});
  banner_to(out, cfg);
  out << "x,y,X,Y,Z\n"
      << fmt(x) << ',' << fmt(y) << ',' << fmt(p[0]) << ',' << fmt(p[1]) << ',' << fmt(p[2]) << '\n';
  return kOk;
}

int cmd_fluxcheck(double field, double area, const std::vector<double>& strings, long n,
                  const Config& cfg, std::ostream& out) {
  const double phase = flux_check(field, area, strings);
  const double total = std::accumulate(strings.begin(), strings.end(), 0.0);
  banner_to(out, cfg);
  out << "field,area,strings,phase,n,shifted_index\n"
      << fmt(field) << ',' << fmt(area) << ',' << fmt(total) << ',' << fmt(phase) << ',' << n << ','
      << fmt(flux_shifted_expansion(phase, n)) << '\n';
  return kOk;
}

}  // namespace xispec::cli
