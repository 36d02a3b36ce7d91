#include "xispec/cusp_model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "xispec/special_functions.hpp"

namespace xispec {

// ------------------------------------------------------------ coefficients

CoefficientPolicy CoefficientPolicy::square_only() { return {}; }

CoefficientPolicy CoefficientPolicy::custom(std::map<long, double> table) {
  for (const auto& [n, a] : table) {
    if (n == 0) throw ValidationError("CoefficientPolicy: n = 0 is not a mode");
    if (!std::isfinite(a)) throw ValidationError("CoefficientPolicy: non-finite coefficient");
  }
  CoefficientPolicy p;
  p.rule_ = Rule::custom;
  p.table_ = std::move(table);
  return p;
}

CoefficientPolicy CoefficientPolicy::with_augmentation(long n, Augmentation aug) const {
  if (n >= 0)
    throw ValidationError("CoefficientPolicy: omega-dependent terms are allowed for n < 0 only");
  if (!std::isfinite(aug.A) || !std::isfinite(aug.B) || !std::isfinite(aug.C))
    throw ValidationError("CoefficientPolicy: non-finite augmentation");
  CoefficientPolicy p = *this;
  p.aug_[n] = aug;
  return p;
}

CoefficientPolicy CoefficientPolicy::parse(const std::string& text) {
  std::vector<std::string> tokens;
  std::stringstream ss(text);
  for (std::string tok; std::getline(ss, tok, ',');) {
    tok.erase(0, tok.find_first_not_of(" \t"));
    tok.erase(tok.find_last_not_of(" \t") + 1);
    if (!tok.empty()) tokens.push_back(tok);
  }
  if (tokens.empty()) throw ValidationError("CoefficientPolicy: empty policy");
  auto number = [](const std::string& s) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(s, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != s.size() || s.empty())
      throw ValidationError("CoefficientPolicy: bad number '" + s + "'");
    return v;
  };
  auto index = [&](const std::string& s) {
    const double v = number(s);
    if (v != std::floor(v)) throw ValidationError("CoefficientPolicy: bad index '" + s + "'");
    return static_cast<long>(v);
  };

  std::map<long, double> table;
  std::vector<std::pair<long, Augmentation>> augs;
  for (std::size_t i = 1; i < tokens.size(); ++i) {
    const auto& t = tokens[i];
    if (auto eq = t.find('='); eq != std::string::npos) {
      table[index(t.substr(0, eq))] = number(t.substr(eq + 1));
    } else if (auto tl = t.find('~'); tl != std::string::npos) {
      std::stringstream parts(t.substr(tl + 1));
      std::vector<double> abc;
      for (std::string c; std::getline(parts, c, '/');) abc.push_back(number(c));
      if (abc.size() != 3)
        throw ValidationError("CoefficientPolicy: augmentation must be A/B/C, got '" + t + "'");
      augs.push_back({index(t.substr(0, tl)), {abc[0], abc[1], abc[2]}});
    } else {
      throw ValidationError("CoefficientPolicy: unrecognised entry '" + t + "'");
    }
  }

  CoefficientPolicy p;
  if (tokens[0] == "square_only") {
    if (!table.empty()) throw ValidationError("CoefficientPolicy: square_only takes no table");
  } else if (tokens[0] == "custom") {
    p = custom(std::move(table));
  } else {
    throw ValidationError("CoefficientPolicy: unknown rule '" + tokens[0] + "'");
  }
  for (const auto& [n, a] : augs) p = p.with_augmentation(n, a);
  return p;
}

double CoefficientPolicy::value(long n) const {
  if (rule_ == Rule::custom) {
    const auto it = table_.find(n);
    return it == table_.end() ? 0.0 : it->second;
  }
  if (n <= 0) return 0.0;
  const long N = std::lround(std::sqrt(static_cast<double>(n)));
  return N * N == n ? std::pow(static_cast<double>(N), -1.5) : 0.0;
}

double CoefficientPolicy::coefficient(long n, double omega) const {
  double a = value(n);
  if (const auto it = aug_.find(n); it != aug_.end()) {
    const double w2 = omega * omega;
    a += it->second.A + it->second.B * w2 + it->second.C * w2 * w2;
  }
  return a;
}

std::vector<long> CoefficientPolicy::support(long n_max) const {
  std::vector<long> out;
  if (rule_ == Rule::custom) {
    for (const auto& [n, a] : table_)
      if (a != 0.0 && std::abs(n) <= n_max) out.push_back(n);
  } else {
    for (long N = 1; N * N <= n_max; ++N) out.push_back(N * N);
  }
  for (const auto& [n, aug] : aug_)
    if (std::abs(n) <= n_max) out.push_back(n);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

// ------------------------------------------------------------------ modes

namespace {

double kappa_of(long n) { return n > 0 ? 2.25 : -2.25; }

// sum over one sign of n, returned in the log domain.
Scaled<Complex> signed_sum(const CoefficientPolicy& policy, double omega,
                           const std::vector<long>& ns) {
  if (ns.empty()) return {Complex(0.0), 0.0};
  std::vector<double> zs;
  for (long n : ns) zs.push_back(4.0 * kPi * static_cast<double>(std::abs(n)));
  const auto samples = whittaker_W_profile(kappa_of(ns.front()), Complex(0.0, 0.5 * omega), zs);
  double top = -INFINITY;
  for (const auto& s : samples) top = std::max(top, s.value.log_scale);
  Complex sum = 0.0;
  for (std::size_t i = 0; i < ns.size(); ++i)
    sum += policy.coefficient(ns[i], omega) * samples[i].value.mantissa *
           std::exp(samples[i].value.log_scale - top);
  return {sum, top};
}

Scaled<Complex> sum_scaled(const CoefficientPolicy& policy, double omega, long n_max) {
  if (n_max < 1) throw ValidationError("characteristic_sum: n_max must be >= 1");
  if (!std::isfinite(omega)) throw DomainError("characteristic_sum: non-finite omega");
  std::vector<long> pos, neg;
  for (long n : policy.support(n_max)) (n > 0 ? pos : neg).push_back(n);
  const auto p = signed_sum(policy, omega, pos);
  const auto m = signed_sum(policy, omega, neg);
  const double top = std::max(p.log_scale, m.log_scale);
  if (!std::isfinite(top)) return {Complex(0.0), 0.0};
  return {p.mantissa * std::exp(p.log_scale - top) + m.mantissa * std::exp(m.log_scale - top), top};
}

}  // namespace

Complex cusp_mode(long n, double omega, double x, double y) {
  if (n == 0) throw ValidationError("cusp_mode: n = 0 is not a decaying mode");
  if (!(y > 0.0)) throw DomainError("cusp_mode: y must be positive");
  const Complex W = whittaker_W(kappa_of(n), Complex(0.0, 0.5 * omega),
                                4.0 * kPi * static_cast<double>(std::abs(n)) * y);
  return std::polar(1.0, 2.0 * kPi * static_cast<double>(n) * x) * W;
}

Complex characteristic_sum(const CoefficientPolicy& policy, double omega, long n_max) {
  return sum_scaled(policy, omega, n_max).value();
}

double scaled_characteristic_sum(const CoefficientPolicy& policy, double omega, long n_max) {
  const auto s = sum_scaled(policy, omega, n_max);
  return s.mantissa.real() * std::exp(s.log_scale + log_scaling_S(omega));
}

CuspGrid sample_modes(const std::vector<ModeTerm>& modes, double omega, double x0, double dx,
                      int nx, double y0, double dy, int ny) {
  if (nx < 1 || ny < 1 || !(dx > 0.0) || !(dy > 0.0) || !(y0 > 0.0))
    throw ValidationError("sample_modes: bad grid");
  CuspGrid g{x0, dx, nx, y0, dy, ny, std::vector<Complex>(static_cast<std::size_t>(nx) * ny)};
  for (const auto& m : modes) {
    if (m.n == 0) throw ValidationError("sample_modes: n = 0 is not a decaying mode");
    std::vector<double> zs;
    for (int j = 0; j < ny; ++j)
      zs.push_back(4.0 * kPi * static_cast<double>(std::abs(m.n)) * (y0 + j * dy));
    const auto prof = whittaker_W_profile(kappa_of(m.n), Complex(0.0, 0.5 * omega), zs);
    for (int j = 0; j < ny; ++j) {
      const Complex W = prof[static_cast<std::size_t>(j)].value.value();
      for (int i = 0; i < nx; ++i)
        g.at(i, j) += m.a * W * std::polar(1.0, 2.0 * kPi * static_cast<double>(m.n) * (x0 + i * dx));
    }
  }
  return g;
}

Residual magnetic_laplacian_residual(const CuspGrid& g, double omega) {
  if (g.psi.size() != static_cast<std::size_t>(g.nx) * g.ny)
    throw ValidationError("magnetic_laplacian_residual: grid size mismatch");
  if (g.ny < 5) throw ResolutionError("magnetic_laplacian_residual: need at least 5 rows in y");
  if (g.dy * std::max(1.0, std::abs(omega)) > g.y0)
    throw ResolutionError("magnetic_laplacian_residual: dy must be <= y / omega");
  const bool wrap = g.periodic_x();
  if (!wrap && g.nx < 5) throw ResolutionError("magnetic_laplacian_residual: need 5 columns in x");

  auto px = [&](int i, int j) -> Complex {
    if (wrap) i = ((i % g.nx) + g.nx) % g.nx;
    return g.at(i, j);
  };
  const double c = 1.0 / 12.0;
  Residual r;
  double scale = 0.0;
  const int ilo = wrap ? 0 : 2, ihi = wrap ? g.nx : g.nx - 2;
  for (int j = 2; j < g.ny - 2; ++j) {
    const double y = g.y0 + j * g.dy;
    for (int i = ilo; i < ihi; ++i) {
      const Complex f = g.at(i, j);
      const Complex fyy = c * (-g.at(i, j + 2) + 16.0 * g.at(i, j + 1) - 30.0 * f +
                               16.0 * g.at(i, j - 1) - g.at(i, j - 2)) / (g.dy * g.dy);
      const Complex fxx =
          c * (-px(i + 2, j) + 16.0 * px(i + 1, j) - 30.0 * f + 16.0 * px(i - 1, j) - px(i - 2, j)) /
          (g.dx * g.dx);
      const Complex fx = c * (-px(i + 2, j) + 8.0 * px(i + 1, j) - 8.0 * px(i - 1, j) + px(i - 2, j)) / g.dx;
      const Complex t1 = -y * y * fyy, t2 = -y * y * fxx, t3 = Complex(0.0, 4.5) * y * fx;
      const Complex t4 = (81.0 / 16.0 - 85.0 / 16.0 - 0.25 * omega * omega) * f;
      r.max_abs = std::max(r.max_abs, std::abs(t1 + t2 + t3 + t4));
      scale = std::max(scale, std::abs(t1) + std::abs(t2) + std::abs(t3) + std::abs(t4));
    }
  }
  r.relative = scale > 0.0 ? r.max_abs / scale : 0.0;
  return r;
}

// ------------------------------------------------------------ asymptotics

WhittakerAsymptotic whittaker_asymptotic(double kappa, double omega, double Y) {
  if (!(omega > 0.0) || !(Y > 0.0)) throw DomainError("whittaker_asymptotic: need omega, Y > 0");
  WhittakerAsymptotic a;
  a.amplitude = std::exp(-kPi * omega / 4.0) * std::pow(0.5 * omega, kappa - 0.5) * std::sqrt(2.0 * Y);
  a.phase = 0.5 * omega * std::log(2.0 * omega / (Y * std::exp(1.0))) + (kappa - 0.5) * kPi / 2.0;
  a.value = a.amplitude * std::cos(a.phase);
  a.omega_over_Y = omega / Y;
  a.in_window = omega >= 4.0 * Y;
  return a;
}

// ------------------------------------------------------------ flux, geometry

double flux_check(double field, double area, const std::vector<double>& strings) {
  if (!(area > 0.0)) throw DomainError("flux_check: area must be positive");
  double total = field * area;
  for (double s : strings) total -= s;
  double r = std::remainder(total, kTwoPi);
  if (r <= -kPi) r += kTwoPi;
  return r;
}

double flux_shifted_expansion(double phase, long n) {
  return static_cast<double>(n) - phase / kTwoPi;
}

Complex flux_symmetry_factor(Complex z) {
  if (!(z.imag() > 0.0)) throw DomainError("flux_symmetry_factor: z must lie in the upper half plane");
  return -std::pow(-z / std::conj(z), 2.25);
}

std::array<double, 3> cusp_embedding(const CuspPoint& p) {
  const double t = kTwoPi * p.y;
  if (!(t >= 1.0)) throw DomainError("cusp_embedding: y must be >= 1 / 2 pi");
  const double rho = 1.0 / t;
  const double h = std::log(t + std::sqrt(t * t - 1.0)) - std::sqrt(1.0 - 1.0 / (t * t));
  return {rho * std::sin(kTwoPi * p.x), rho * std::cos(kTwoPi * p.x), h};
}

}  // namespace xispec
