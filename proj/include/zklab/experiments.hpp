#pragma once

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "zklab/config.hpp"
#include "zklab/plasma.hpp"
#include "zklab/profiles.hpp"
#include "zklab/zk.hpp"

namespace zkl {

/// A pass/fail check: passes when value <= limit (or the stated condition).
struct Gate {
  std::string name;
  bool pass = false;
  double value = 0.0;
  double limit = 0.0;
  std::string detail;
};

/// Least-squares line through (log x, log y). Needs two or more points with
/// positive x and y; otherwise slope is NaN.
struct PowerFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
  int points = 0;
};
PowerFit fit_power_law(const std::vector<double>& x, const std::vector<double>& y);

/// Keeps the modes with |m_j| <= band * N_j on every axis.
ScalarField band_limit(const ScalarField& f, double band);

/// The configured initial profile, already band-limited (except kind "file").
ScalarField initial_profile(const InitialData& init, const GridPtr& grid, const PlasmaParams& p, std::uint64_t seed);

/// The ZK coefficients and profile construction matching the plasma model.
ZKCoefficients model_coeffs(const PlasmaParams& p);
ProfileSet model_profiles(const ScalarField& n1, const PlasmaParams& p, double T);

/// Header comment shared by every CSV of a run.
std::string csv_comment(const ExperimentConfig& cfg);

// Poisson: pointwise bounds, energy inequality, cross-solver agreement,
// constant-density exactness.
struct PoissonSample {
  double ninf = 0, phi_min = 0, phi_max = 0, bound_lo = 0, bound_hi = 0;
  double energy_lhs = 0, half_I1 = 0, solver_gap = 0, residual = 0;
  int newton_iterations = 0, monotone_iterations = 0;
};
struct PoissonStudy {
  std::vector<PoissonSample> samples;
  double bound_violation = -1e300;   // largest signed excursion outside [lo, hi]
  double energy_violation = -1e300;  // largest energy_lhs - I1/2
  double max_solver_gap = 0;    // L2 distance Newton vs monotone
  double constant_error = 0;    // n = c exactness, unscaled and scaled
  std::vector<Gate> gates;
  std::vector<std::string> files;
};
PoissonStudy run_poisson(const ExperimentConfig& cfg);

// Estimate for u = M_eps(phi)^{-1} v, in the printed form
//   e^{-eps|phi|/2}|u| + sqrt(eps)|grad u| <= e^{eps|phi|/2}|v|
// and the form that follows from testing M_eps(phi) u = v against u,
//   sqrt(e^{-eps|phi|}|u|^2 + eps|grad u|^2) <= e^{eps|phi|/2}|v|.
struct EstimateRow {
  double eps = 0, phi_inf = 0, lhs = 0, lhs_energy = 0, rhs = 0;
};
struct EstimateStudy {
  std::vector<EstimateRow> rows;
  double worst_ratio = 0;         // max lhs / rhs
  double worst_energy_ratio = 0;  // max lhs_energy / rhs
};
EstimateStudy inverse_estimate_study(const GridPtr& grid, std::uint64_t seed, int pairs, const std::vector<double>& eps);

// Simulation with conservation log.
struct SimulateReport {
  SimulationResult sim;
  double H_drift = 0;  // NaN when alpha > 0
  double P_drift = 0;
  std::vector<Gate> gates;
  std::vector<std::string> files;
};
/// Initial data: the ansatz built on the configured profile at t = 0 (kind
/// "zero" gives the rest state). With a = 0 the profile starts as
/// n = n1, v = (c n1, 0, 0).
PlasmaState initial_state(const ExperimentConfig& cfg, double eps);
SimulateReport run_simulate(const ExperimentConfig& cfg);

struct ZKReport {
  ZKTrajectory trajectory;
  double mean_drift = 0, M_drift = 0, H_drift = 0;
  double gradient_check = 0;  // finite-difference vs variational derivative
  double flux_check = 0;      // <dH/dn, rhs> relative
  std::vector<Gate> gates;
  std::vector<std::string> files;
};
ZKReport run_zk(const ExperimentConfig& cfg);

struct ProfilesReport {
  ProfileSet profiles;
  CancellationReport cancellation;
  std::vector<Gate> gates;
  std::vector<std::string> files;
};
ProfilesReport run_profiles(const ExperimentConfig& cfg);

struct ConsistencyReport {
  std::vector<ResidualReport> rows;  // eps-major, then norms
  struct Fit {
    double s = 0;
    std::string quantity;
    double slope = 0, target = 0, tol = 0;
  };
  std::vector<Fit> fits;
  bool skipped = false;  // identically zero profile
  std::vector<Gate> gates;
  std::vector<std::string> files;
};
ConsistencyReport run_consistency(const ExperimentConfig& cfg);

struct ConvergenceReport {
  std::vector<double> eps;
  std::vector<double> times;  // fast sample times
  /// errors[e][k][i]: eps[e], norm k, times[i]; NaN after an abort.
  std::vector<std::vector<std::vector<double>>> errors;
  /// slow_errors[e][k]: error at t = T_star / eps[e], and relative to the ansatz size.
  std::vector<std::vector<double>> slow_errors, slow_relative;
  std::vector<bool> aborted;
  std::vector<std::string> abort_reason;
  std::vector<PowerFit> p_fast;  // per norm, at t_star
  std::vector<PowerFit> p_slow;  // per norm, at T_star
  std::vector<std::vector<PowerFit>> growth;  // [e][k], e(t) over t in [0.5, 2]
  bool skipped = false;
  std::vector<Gate> gates;
  std::vector<std::string> files;
};
ConvergenceReport run_convergence(const ExperimentConfig& cfg);

struct DispersionStudy {
  int roots = 0;
  double a0_deviation = 0;        // a = 0 roots vs |k|^2 / (1 + |k|^2)
  double equivalent_residual = 0;
  int resonant_skipped = 0;
  std::vector<Gate> gates;
  std::vector<std::string> files;
};
DispersionStudy run_dispersion(const ExperimentConfig& cfg);

struct AlphaLimitReport {
  std::vector<double> alpha;
  std::vector<double> distance;  // to the alpha = 0 run at alpha_probe_time
  std::vector<double> reached;   // time reached (<= horizon)
  std::vector<std::string> abort_reason;
  std::vector<Gate> gates;
  std::vector<std::string> files;
};
AlphaLimitReport run_alpha_limit(const ExperimentConfig& cfg);

/// Runs cfg.experiment, writes its CSVs and summary.json into cfg.output_dir.
struct ExperimentResult {
  std::vector<Gate> gates;
  nlohmann::ordered_json summary;
  std::vector<std::string> files;
  bool passed() const;
};
ExperimentResult run_experiment(const ExperimentConfig& cfg);

}  // namespace zkl
