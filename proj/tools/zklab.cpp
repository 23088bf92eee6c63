// Command-line front end: one subcommand per experiment.
#include <cstdio>
#include <iostream>
#include <optional>

#include "CLI11.hpp"
#include "zklab/config.hpp"
#include "zklab/csv.hpp"
#include "zklab/experiments.hpp"

namespace {

struct Overrides {
  std::optional<double> eps, a, alpha, c0, dt, horizon, T1, zk_dt, amplitude;
  std::optional<int> dim;
  std::vector<int> points;
  std::vector<double> lengths, eps_sweep, alpha_sweep, norms;
  std::optional<std::string> initial, initial_file;
  bool isothermal = false;
};

void add_overrides(CLI::App* sub, Overrides& o) {
  sub->add_option("--eps", o.eps, "Scaling parameter eps");
  sub->add_option("--a", o.a, "Magnetic field strength a");
  sub->add_option("--alpha", o.alpha, "Isothermal pressure coefficient (implies --isothermal)");
  sub->add_flag("--isothermal", o.isothermal, "Use the isothermal model");
  sub->add_option("--c0", o.c0, "Density floor c0");
  sub->add_option("--dim", o.dim, "Spatial dimension");
  sub->add_option("--points", o.points, "Points per axis");
  sub->add_option("--lengths", o.lengths, "Box length per axis");
  sub->add_option("--dt", o.dt, "Fast-time step bound");
  sub->add_option("--horizon", o.horizon, "Fast-time horizon");
  sub->add_option("--T-end", o.T1, "Slow-time horizon of the ZK run");
  sub->add_option("--zk-dt", o.zk_dt, "Slow-time step bound");
  sub->add_option("--eps-sweep", o.eps_sweep, "Decreasing eps values");
  sub->add_option("--alpha-sweep", o.alpha_sweep, "Decreasing alpha values ending at 0");
  sub->add_option("--norms", o.norms, "Sobolev indices s of the reported norms");
  sub->add_option("--initial", o.initial, "gaussian | soliton | random | file | zero");
  sub->add_option("--initial-file", o.initial_file, "Field dump for --initial file");
  sub->add_option("--amplitude", o.amplitude, "Initial amplitude");
}

void apply(const Overrides& o, zkl::ExperimentConfig& cfg) {
  if (o.eps) cfg.plasma.eps = *o.eps;
  if (o.a) cfg.plasma.a = *o.a;
  if (o.alpha) {
    cfg.plasma.alpha = *o.alpha;
    cfg.plasma.isothermal = true;
  }
  if (o.isothermal) cfg.plasma.isothermal = true;
  if (o.c0) cfg.plasma.c0 = *o.c0;
  if (o.dim) {
    cfg.grid.dim = *o.dim;
    if (o.points.empty()) cfg.grid.points.assign(*o.dim, cfg.grid.points.front());
    if (o.lengths.empty()) cfg.grid.lengths.assign(*o.dim, cfg.grid.lengths.front());
  }
  if (!o.points.empty()) cfg.grid.points = o.points;
  if (!o.lengths.empty()) cfg.grid.lengths = o.lengths;
  if (o.dt) cfg.dt = *o.dt;
  if (o.horizon) cfg.horizon = *o.horizon;
  if (o.T1) cfg.T1 = *o.T1;
  if (o.zk_dt) cfg.zk_dt = *o.zk_dt;
  if (!o.eps_sweep.empty()) cfg.eps_sweep = o.eps_sweep;
  if (!o.alpha_sweep.empty()) cfg.alpha_sweep = o.alpha_sweep;
  if (!o.norms.empty()) cfg.norms = o.norms;
  if (o.initial) cfg.initial.kind = *o.initial;
  if (o.initial_file) {
    cfg.initial.path = *o.initial_file;
    if (!o.initial) cfg.initial.kind = "file";
  }
  if (o.amplitude) cfg.initial.amplitude = *o.amplitude;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Long-wave plasma experiments: Euler-Poisson, Zakharov-Kuznetsov and their comparison"};
  app.set_version_flag("--version", std::string(ZKLAB_VERSION));
  std::string config_path, out_dir;
  std::optional<int> threads;
  std::optional<std::uint64_t> seed;
  bool quiet = false;
  app.add_option("--config", config_path, "JSON experiment configuration")->check(CLI::ExistingFile);
  app.add_option("--out", out_dir, "Output directory");
  app.add_option("--threads", threads, "FFT threads")->check(CLI::PositiveNumber);
  app.add_option("--seed", seed, "Seed for random data");
  app.add_flag("-q,--quiet", quiet, "Do not echo the configuration");
  app.require_subcommand(1);

  Overrides ov;
  const std::pair<zkl::Experiment, const char*> subs[] = {
      {zkl::Experiment::Poisson, "Nonlinear Poisson solver study"},
      {zkl::Experiment::Simulate, "Euler-Poisson run with conservation log"},
      {zkl::Experiment::Zk, "ZK run with invariant log"},
      {zkl::Experiment::Profiles, "Long-wave profiles and their cancellation checks"},
      {zkl::Experiment::Consistency, "Residual orders of the ansatz"},
      {zkl::Experiment::Converge, "Euler-Poisson vs ZK error study"},
      {zkl::Experiment::Dispersion, "Linear dispersion roots over a k-lattice"},
      {zkl::Experiment::AlphaLimit, "Isothermal runs as alpha -> 0"},
  };
  std::vector<std::pair<CLI::App*, zkl::Experiment>> commands;
  for (const auto& [e, help] : subs) {
    CLI::App* sub = app.add_subcommand(zkl::to_string(e), help);
    sub->fallthrough();
    add_overrides(sub, ov);
    commands.emplace_back(sub, e);
  }

  CLI11_PARSE(app, argc, argv);

  try {
    zkl::ExperimentConfig cfg = config_path.empty() ? zkl::ExperimentConfig{} : zkl::parse_config(config_path);
    for (const auto& [sub, e] : commands) {
      if (sub->parsed()) cfg.experiment = e;
    }
    apply(ov, cfg);
    if (!out_dir.empty()) cfg.output_dir = out_dir;
    if (threads) cfg.threads = *threads;
    if (seed) cfg.seed = *seed;
    cfg.validate();
    if (!quiet) std::cout << zkl::to_json(cfg).dump(2) << '\n';

    const zkl::ExperimentResult res = zkl::run_experiment(cfg);
    for (const auto& g : res.gates) {
      std::printf("%s %s value=%s limit=%s%s%s\n", g.pass ? "PASS" : "FAIL", g.name.c_str(),
                  zkl::format_double(g.value).c_str(), zkl::format_double(g.limit).c_str(), g.detail.empty() ? "" : " ",
                  g.detail.c_str());
    }
    std::printf("summary: %s/summary.json\n", cfg.output_dir.c_str());
    return res.passed() ? 0 : 1;
  } catch (const zkl::Error& e) {
    std::fprintf(stderr, "zklab: %s\n", e.what());
    const bool usage = e.kind() == zkl::ErrorKind::ParseError || e.kind() == zkl::ErrorKind::ValidationError;
    return usage ? 2 : 3;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "zklab: %s\n", e.what());
    return 3;
  }
}
