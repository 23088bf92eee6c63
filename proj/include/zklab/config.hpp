#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"
#include "zklab/grid.hpp"
#include "zklab/plasma.hpp"

namespace zkl {

enum class Experiment { Poisson, Simulate, Zk, Profiles, Consistency, Converge, Dispersion, AlphaLimit };

std::string to_string(Experiment e);
/// Throws ParseError for an unknown name.
Experiment experiment_from_string(const std::string& name);

struct GridSpec {
  int dim = 2;
  std::vector<int> points{128, 128};
  std::vector<double> lengths{40.0, 40.0};

  GridPtr make() const;
  bool operator==(const GridSpec&) const = default;
};

/// Initial profile n1 (or density for the simulate experiment).
///   gaussian: amplitude exp(-|x|^2 / width2)
///   soliton:  line soliton of the ZK equation travelling in x at `speed`
///   random:   smooth random field, |k| <= kcut, max = amplitude
///   file:     field dump at `path`
///   zero
/// Every kind except file is cut to |m_j| <= band N_j along each axis.
struct InitialData {
  std::string kind = "gaussian";
  double amplitude = 0.5;
  double width2 = 4.0;
  double speed = 0.5;
  double kcut = 1.0;
  double band = 0.25;
  std::string path;
  bool operator==(const InitialData&) const = default;
};

struct ExperimentConfig {
  Experiment experiment = Experiment::Converge;
  GridSpec grid;
  PlasmaParams plasma{0.1, 1.0, 0.0, 0.5, false};
  std::vector<double> eps_sweep{0.2, 0.1, 0.05};
  std::vector<double> alpha_sweep{0.4, 0.2, 0.1, 0.05, 0.0};
  double T1 = 1.0;          // slow-time horizon of the zk experiment
  double horizon = 10.0;    // fast-time horizon of simulate and alpha-limit
  double dt = 0.01;         // fast-time step bound
  double zk_dt = 0.005;     // slow-time step bound
  double t_star = 1.0;      // fast time of the headline exponent fit
  double T_star = 0.1;      // slow time of the supplementary fit
  std::vector<double> sample_times{0.5, 1.0, 1.5, 2.0};
  std::vector<double> norms{0.0, 3.0};
  double alpha_probe_time = 1.0;
  int samples = 50;          // poisson experiment
  double sample_amplitude = 0.6;
  int lattice = 20;          // dispersion experiment, points per axis
  double k_step = 0.25;
  InitialData initial;
  std::uint64_t seed = 1;
  int threads = 1;
  std::string output_dir = "out";

  /// Throws ValidationError naming the offending key.
  void validate() const;
  bool operator==(const ExperimentConfig&) const = default;
};

/// Missing keys keep their defaults; unknown keys and type mismatches raise
/// ParseError, out-of-range values ValidationError.
ExperimentConfig parse_config_json(const nlohmann::json& j);
ExperimentConfig parse_config_string(const std::string& text);
ExperimentConfig parse_config(const std::string& path);

/// Canonical form: every key, fixed order.
nlohmann::ordered_json to_json(const ExperimentConfig& cfg);

}  // namespace zkl
