#include <CLI11.hpp>
#include <cstdlib>
#include <fstream>
#include <memory>
#include <ostream>

#include "cli.hpp"

namespace xispec::cli {

namespace {

struct FunctionFlags {
  std::string kappa, z, gamma, order, policy, n_max;

  void attach(CLI::App* cmd) {
    cmd->add_option("--kappa", kappa, "Whittaker kappa / Morse kappa");
    cmd->add_option("--z", z, "argument of K or W (defaults 2pi and 4pi)");
    cmd->add_option("--gamma", gamma, "Morse gamma");
    cmd->add_option("--order", order, "Polya approximation order (1 or 2)");
    cmd->add_option("--policy", policy, "coefficient policy for sumw");
    cmd->add_option("--nmax", n_max, "mode cutoff |n| <= nmax for sumw");
  }

  void apply(Config& cfg) const {
    if (!kappa.empty()) cfg.set("eval.kappa", kappa);
    if (!z.empty()) cfg.set("eval.z", z);
    if (!gamma.empty()) cfg.set("eval.gamma", gamma);
    if (!order.empty()) cfg.set("eval.order", order);
    if (!policy.empty()) cfg.set("cusp.policy", policy);
    if (!n_max.empty()) cfg.set("cusp.n_max", n_max);
  }
};

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Spectral models of the Riemann xi function: evaluation, zeros and figure data."};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path, output, threads;
  std::vector<std::string> sets;
  app.add_option("--config", config_path, "INI config (default: $XISPEC_CONFIG)");
  app.add_option("--set", sets, "override a config key, section.key=value");
  app.add_option("--threads", threads, "worker threads, 0 for all cores");
  app.add_option("-o,--output", output, "write to this file instead of stdout");

  FunctionFlags eval_flags, zero_flags;
  std::string name, grid, range, against, figure_id, out_dir = ".", ex, ey, field, area;
  std::vector<std::string> strings;
  long flux_n = 1;

  auto* eval = app.add_subcommand("eval", "evaluate a function on a grid");
  eval->add_option("function", name, "registry name")->required();
  eval->add_option("grid", grid, "start:stop:step or a,b,c")->required();
  eval_flags.attach(eval);

  auto* zeros = app.add_subcommand("zeros", "locate sign changes, optionally paired with another function");
  zeros->add_option("function", name)->required();
  zeros->add_option("range", range, "start:stop[:step]")->required();
  zeros->add_option("--against", against, "second function to pair zeros with");
  zero_flags.attach(zeros);

  auto* figure = app.add_subcommand("figure", "write the data of one figure");
  figure->add_option("id", figure_id)->required()->check(CLI::IsMember(figure_ids()));
  figure->add_option("--out-dir", out_dir, "directory for the output file");

  auto* embed = app.add_subcommand("embed", "image of x + iy on the embedded cusp");
  embed->add_option("x", ex)->required();
  embed->add_option("y", ey)->required();

  auto* flux = app.add_subcommand("fluxcheck", "residual phase of field*area against flux strings");
  flux->add_option("field", field)->required();
  flux->add_option("area", area)->required();
  flux->add_option("strings", strings, "string strengths");
  flux->add_option("--n", flux_n, "expansion index to shift");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    Config cfg;
    if (config_path.empty())
      if (const char* env = std::getenv("XISPEC_CONFIG"); env && *env) config_path = env;
    if (!config_path.empty()) cfg.load_ini(config_path);
    for (const auto& s : sets) cfg.set(s);
    if (!threads.empty()) cfg.set("run.threads", threads);

    std::unique_ptr<std::ofstream> file;
    if (!output.empty()) {
      file = std::make_unique<std::ofstream>(output);
      if (!*file) throw UsageError("cannot write '" + output + "'");
    }
    std::ostream& sink = file ? *file : out;

    if (*eval) {
      eval_flags.apply(cfg);
      return cmd_eval(name, grid, cfg, sink);
    }
    if (*zeros) {
      zero_flags.apply(cfg);
      return cmd_zeros(name, range, against, cfg, sink);
    }
    if (*figure) return cmd_figure(figure_id, out_dir, cfg, sink);
    if (*embed) return cmd_embed(parse_real(ex), parse_real(ey), cfg, sink);
    std::vector<double> s;
    for (const auto& t : strings) s.push_back(parse_real(t));
    return cmd_fluxcheck(parse_real(field), parse_real(area), s, flux_n, cfg, sink);
  } catch (const UsageError& e) {
    err << "xispec: " << e.what() << '\n';
    return kUsage;
  } catch (const NumericError& e) {
    err << "xispec: numeric failure: " << e.what() << '\n';
    return kNumeric;
  }
}

}  // namespace xispec::cli
