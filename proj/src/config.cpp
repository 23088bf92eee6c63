#include "zklab/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace zkl {
namespace {

using nlohmann::json;

constexpr std::pair<Experiment, const char*> kNames[] = {
    {Experiment::Poisson, "poisson"},         {Experiment::Simulate, "simulate"},
    {Experiment::Zk, "zk"},                   {Experiment::Profiles, "profiles"},
    {Experiment::Consistency, "consistency"}, {Experiment::Converge, "converge"},
    {Experiment::Dispersion, "dispersion"},   {Experiment::AlphaLimit, "alpha-limit"},
};

const std::set<std::string> kKinds{"gaussian", "soliton", "random", "file", "zero"};

[[noreturn]] void invalid(const std::string& key, const std::string& why) {
  throw Error(ErrorKind::ValidationError, key + ": " + why);
}

// Reads the keys of one JSON object, remembering which were consumed.
class Reader {
 public:
  Reader(const json& obj, std::string prefix) : obj_(obj), prefix_(std::move(prefix)) {
    if (!obj_.is_object()) throw Error(ErrorKind::ParseError, name("") + " must be an object");
  }

  template <class T>
  void get(const char* key, T& out) {
    seen_.insert(key);
    const auto it = obj_.find(key);
    if (it == obj_.end()) return;
    if constexpr (std::is_same_v<T, double>) {
      if (!it->is_number()) throw Error(ErrorKind::ParseError, name(key) + " must be a number");
    } else if constexpr (std::is_same_v<T, int> || std::is_same_v<T, std::uint64_t>) {
      if (!it->is_number_integer()) throw Error(ErrorKind::ParseError, name(key) + " must be an integer");
      if (std::is_same_v<T, std::uint64_t> && it->is_number_integer() && !it->is_number_unsigned()) {
        throw Error(ErrorKind::ParseError, name(key) + " must be non-negative");
      }
    } else if constexpr (std::is_same_v<T, bool>) {
      if (!it->is_boolean()) throw Error(ErrorKind::ParseError, name(key) + " must be a boolean");
    } else if constexpr (std::is_same_v<T, std::string>) {
      if (!it->is_string()) throw Error(ErrorKind::ParseError, name(key) + " must be a string");
    } else {
      if (!it->is_array()) throw Error(ErrorKind::ParseError, name(key) + " must be an array");
      for (const auto& e : *it) {
        if (!e.is_number() || (std::is_integral_v<typename T::value_type> && !e.is_number_integer())) {
          throw Error(ErrorKind::ParseError, name(key) + " has a non-numeric entry");
        }
      }
    }
    out = it->get<T>();
  }

  const json* object(const char* key) {
    seen_.insert(key);
    const auto it = obj_.find(key);
    return it == obj_.end() ? nullptr : &*it;
  }

  std::string name(const std::string& key) const {
    if (prefix_.empty()) return key.empty() ? "config" : key;
    return key.empty() ? prefix_ : prefix_ + "." + key;
  }

  void reject_unknown() const {
    for (const auto& [key, value] : obj_.items()) {
      if (!seen_.count(key)) throw Error(ErrorKind::ParseError, "unknown key '" + name(key) + "'");
    }
  }

 private:
  const json& obj_;
  std::string prefix_;
  std::set<std::string> seen_;
};

void check_positive(const std::string& key, double v) {
  if (!(v > 0.0) || !std::isfinite(v)) invalid(key, "must be positive");
}

void check_decreasing(const std::string& key, const std::vector<double>& v) {
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (!(v[i] < v[i - 1])) invalid(key, "must be strictly decreasing");
  }
}

}  // namespace

std::string to_string(Experiment e) {
  for (const auto& [value, name] : kNames) {
    if (value == e) return name;
  }
  return "unknown";
}

Experiment experiment_from_string(const std::string& name) {
  for (const auto& [value, n] : kNames) {
    if (name == n) return value;
  }
  throw Error(ErrorKind::ParseError, "experiment: unknown name '" + name + "'");
}

GridPtr GridSpec::make() const { return Grid::make(dim, points, lengths); }

void ExperimentConfig::validate() const {
  if (grid.dim < 1 || grid.dim > 3) invalid("grid.dim", "must be 1, 2 or 3");
  if (static_cast<int>(grid.points.size()) != grid.dim) invalid("grid.points", "needs one entry per axis");
  if (static_cast<int>(grid.lengths.size()) != grid.dim) invalid("grid.lengths", "needs one entry per axis");
  for (int n : grid.points) {
    if (n < 8 || (n & (n - 1)) != 0) invalid("grid.points", "entries must be powers of two >= 8");
  }
  for (double L : grid.lengths) check_positive("grid.lengths", L);

  if (!(plasma.eps > 0.0 && plasma.eps <= 1.0)) invalid("plasma.eps", "must lie in (0, 1]");
  if (!(plasma.a >= 0.0) || !std::isfinite(plasma.a)) invalid("plasma.a", "must be >= 0");
  if (!(plasma.alpha >= 0.0) || !std::isfinite(plasma.alpha)) invalid("plasma.alpha", "must be >= 0");
  if (plasma.alpha > 0.0 && !plasma.isothermal) invalid("plasma.alpha", "alpha > 0 needs plasma.isothermal = true");
  check_positive("plasma.c0", plasma.c0);

  if (eps_sweep.empty()) invalid("eps_sweep", "must not be empty");
  for (double e : eps_sweep) {
    if (!(e > 0.0 && e <= 1.0)) invalid("eps_sweep", "entries must lie in (0, 1]");
  }
  check_decreasing("eps_sweep", eps_sweep);
  if (experiment == Experiment::Converge || experiment == Experiment::Consistency) {
    if (eps_sweep.size() < 3) invalid("eps_sweep", "fits need at least three values");
  }
  if (alpha_sweep.empty()) invalid("alpha_sweep", "must not be empty");
  for (double a : alpha_sweep) {
    if (!(a >= 0.0) || !std::isfinite(a)) invalid("alpha_sweep", "entries must be >= 0");
  }
  check_decreasing("alpha_sweep", alpha_sweep);
  if (experiment == Experiment::AlphaLimit && alpha_sweep.back() != 0.0) {
    invalid("alpha_sweep", "must end with 0");
  }

  check_positive("T1", T1);
  if (!(horizon >= 0.0) || !std::isfinite(horizon)) invalid("horizon", "must be >= 0");
  check_positive("dt", dt);
  check_positive("zk_dt", zk_dt);
  check_positive("t_star", t_star);
  check_positive("T_star", T_star);
  check_positive("alpha_probe_time", alpha_probe_time);
  if (sample_times.empty()) invalid("sample_times", "must not be empty");
  for (std::size_t i = 0; i < sample_times.size(); ++i) {
    check_positive("sample_times", sample_times[i]);
    if (i > 0 && !(sample_times[i] > sample_times[i - 1])) invalid("sample_times", "must be strictly increasing");
  }
  bool has_t_star = false;
  for (double t : sample_times) has_t_star |= std::abs(t - t_star) <= 1e-12 * t_star;
  if (!has_t_star) invalid("t_star", "must be one of sample_times");
  if (norms.empty()) invalid("norms", "must not be empty");
  for (double s : norms) {
    if (!(s >= 0.0) || !std::isfinite(s)) invalid("norms", "entries must be >= 0");
  }
  if (samples < 1) invalid("samples", "must be >= 1");
  if (!(sample_amplitude > 0.0 && sample_amplitude < 1.0)) invalid("sample_amplitude", "must lie in (0, 1)");
  if (lattice < 1) invalid("lattice", "must be >= 1");
  check_positive("k_step", k_step);

  if (!kKinds.count(initial.kind)) invalid("initial.kind", "must be gaussian, soliton, random, file or zero");
  if (!std::isfinite(initial.amplitude)) invalid("initial.amplitude", "must be finite");
  check_positive("initial.width2", initial.width2);
  check_positive("initial.speed", initial.speed);
  check_positive("initial.kcut", initial.kcut);
  if (!(initial.band > 0.0 && initial.band <= 0.5)) invalid("initial.band", "must lie in (0, 0.5]");
  if (initial.kind == "file" && initial.path.empty()) invalid("initial.path", "required for kind 'file'");

  if (threads < 1) invalid("threads", "must be >= 1");
  if (output_dir.empty()) invalid("output_dir", "must not be empty");
}

ExperimentConfig parse_config_json(const json& j) {
  ExperimentConfig cfg;
  Reader top(j, "");
  std::string experiment = to_string(cfg.experiment);
  top.get("experiment", experiment);
  cfg.experiment = experiment_from_string(experiment);

  if (const json* g = top.object("grid")) {
    Reader r(*g, "grid");
    r.get("dim", cfg.grid.dim);
    r.get("points", cfg.grid.points);
    r.get("lengths", cfg.grid.lengths);
    r.reject_unknown();
  }
  if (const json* p = top.object("plasma")) {
    Reader r(*p, "plasma");
    r.get("eps", cfg.plasma.eps);
    r.get("a", cfg.plasma.a);
    r.get("alpha", cfg.plasma.alpha);
    r.get("c0", cfg.plasma.c0);
    r.get("isothermal", cfg.plasma.isothermal);
    r.reject_unknown();
  }
  if (const json* i = top.object("initial")) {
    Reader r(*i, "initial");
    r.get("kind", cfg.initial.kind);
    r.get("amplitude", cfg.initial.amplitude);
    r.get("width2", cfg.initial.width2);
    r.get("speed", cfg.initial.speed);
    r.get("kcut", cfg.initial.kcut);
    r.get("band", cfg.initial.band);
    r.get("path", cfg.initial.path);
    r.reject_unknown();
  }
  top.get("eps_sweep", cfg.eps_sweep);
  top.get("alpha_sweep", cfg.alpha_sweep);
  top.get("T1", cfg.T1);
  top.get("horizon", cfg.horizon);
  top.get("dt", cfg.dt);
  top.get("zk_dt", cfg.zk_dt);
  top.get("t_star", cfg.t_star);
  top.get("T_star", cfg.T_star);
  top.get("sample_times", cfg.sample_times);
  top.get("norms", cfg.norms);
  top.get("alpha_probe_time", cfg.alpha_probe_time);
  top.get("samples", cfg.samples);
  top.get("sample_amplitude", cfg.sample_amplitude);
  top.get("lattice", cfg.lattice);
  top.get("k_step", cfg.k_step);
  top.get("seed", cfg.seed);
  top.get("threads", cfg.threads);
  top.get("output_dir", cfg.output_dir);
  top.reject_unknown();
  cfg.validate();
  return cfg;
}

ExperimentConfig parse_config_string(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::ParseError, e.what());
  }
  return parse_config_json(j);
}

ExperimentConfig parse_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::IoError, "cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_string(ss.str());
}

nlohmann::ordered_json to_json(const ExperimentConfig& cfg) {
  nlohmann::ordered_json j;
  j["experiment"] = to_string(cfg.experiment);
  j["grid"] = {{"dim", cfg.grid.dim}, {"points", cfg.grid.points}, {"lengths", cfg.grid.lengths}};
  j["plasma"] = {{"eps", cfg.plasma.eps},
                 {"a", cfg.plasma.a},
                 {"alpha", cfg.plasma.alpha},
                 {"c0", cfg.plasma.c0},
                 {"isothermal", cfg.plasma.isothermal}};
  j["initial"] = {{"kind", cfg.initial.kind},     {"amplitude", cfg.initial.amplitude},
                  {"width2", cfg.initial.width2}, {"speed", cfg.initial.speed},
                  {"kcut", cfg.initial.kcut},     {"band", cfg.initial.band},
                  {"path", cfg.initial.path}};
  j["eps_sweep"] = cfg.eps_sweep;
  j["alpha_sweep"] = cfg.alpha_sweep;
  j["T1"] = cfg.T1;
  j["horizon"] = cfg.horizon;
  j["dt"] = cfg.dt;
  j["zk_dt"] = cfg.zk_dt;
  j["t_star"] = cfg.t_star;
  j["T_star"] = cfg.T_star;
  j["sample_times"] = cfg.sample_times;
  j["norms"] = cfg.norms;
  j["alpha_probe_time"] = cfg.alpha_probe_time;
  j["samples"] = cfg.samples;
  j["sample_amplitude"] = cfg.sample_amplitude;
  j["lattice"] = cfg.lattice;
  j["k_step"] = cfg.k_step;
  j["seed"] = cfg.seed;
  j["threads"] = cfg.threads;
  j["output_dir"] = cfg.output_dir;
  return j;
}

}  // namespace zkl
