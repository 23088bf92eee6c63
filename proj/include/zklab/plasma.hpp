#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "zklab/field.hpp"
#include "zklab/poisson.hpp"

namespace zkl {

struct PlasmaParams {
  double eps = 0.1;
  double a = 1.0;
  double alpha = 0.0;
  double c0 = 0.5;  // the run aborts once inf(1 + eps n) < c0 / 2
  /// Selects the isothermal right-hand side. With alpha = 0 it reproduces
  /// the cold system bit for bit.
  bool isothermal = false;

  void validate(int dim) const;
  bool operator==(const PlasmaParams&) const = default;
};

struct PlasmaState {
  ScalarField n;
  VectorField v;
  ScalarField phi;
  double t = 0.0;
};

/// Rest state on a grid (phi = 0 solves the Poisson equation exactly).
PlasmaState rest_state(const GridPtr& grid);

/// Solves for phi from n (warm-started from state.phi when present).
void enforce_poisson(PlasmaState& state, const PlasmaParams& p, const SolverConfig& cfg = {});

struct Tendency {
  ScalarField dn;
  VectorField dv;
};

/// Time derivative of (n, v) including the magnetic term, with phi taken from
/// state.phi as given. Products are dealiased.
Tendency rhs(const PlasmaState& state, const PlasmaParams& p);

/// Exact flow of d_t v = -a eps^(-1/2) e x v over dt: (v_y, v_z) rotate by
/// theta = a eps^(-1/2) dt; identity in 1D.
VectorField rotation_substep(const VectorField& v, double dt, const PlasmaParams& p);

/// 0.4 min h / (1 + eps max|v| + sqrt(1 + alpha)).
double cfl_limit(const PlasmaState& state, const PlasmaParams& p);

/// Strang step: half rotation, RK4 for the remaining terms with phi
/// re-solved at every stage, half rotation, final Poisson solve.
/// Throws CFLViolation or DensityFloorViolated.
PlasmaState step(const PlasmaState& state, double dt, const PlasmaParams& p, const SolverConfig& cfg = {});

struct HamiltonianValue {
  double raw = 0.0;     // unscaled energy of the reconstructed unscaled fields
  double scaled = 0.0;  // raw * eps^(d/2 - 2)
};

/// Cold-plasma energy int [ (1+n)|v|^2/2 + |grad phi|^2/2 + e^phi (phi-1) + 1 ]
/// in unscaled variables.
HamiltonianValue hamiltonian(const PlasmaState& state, const PlasmaParams& p);

/// int (1 + eps n) v dx, three entries (unused ones are zero).
std::array<double, 3> impulse(const PlasmaState& state, const PlasmaParams& p);

struct ConservationRecord {
  double t = 0.0;
  double H = 0.0;  // scaled value; NaN when alpha > 0
  std::array<double, 3> P{};
  double l2_n = 0.0;
  double l2_v = 0.0;
  double hs_n = 0.0;
  double hseps_v = 0.0;
};

struct SimulationConfig {
  double horizon = 1.0;
  double dt = 0.01;  // upper bound; the step is shrunk to divide the horizon
  double snapshot_every = 0.0;  // 0 disables snapshots
  double norm_s = 3.0;
  bool stop_on_error = false;   // rethrow instead of reporting an abort
  SolverConfig poisson;
};

struct SimulationResult {
  PlasmaState final_state;  // last good state when aborted
  std::vector<ConservationRecord> log;
  std::vector<PlasmaState> snapshots;
  bool aborted = false;
  std::optional<ErrorKind> abort_kind;
  std::string abort_reason;
  int steps = 0;
};

ConservationRecord conservation_record(const PlasmaState& s, const PlasmaParams& p, double norm_s);

SimulationResult simulate(const PlasmaState& initial, const PlasmaParams& p, const SimulationConfig& cfg);

}  // namespace zkl
