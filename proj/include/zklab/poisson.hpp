#pragma once

#include <optional>

#include "zklab/field.hpp"

namespace zkl {

struct SolverConfig {
  double tol = 1e-11;            // L2 residual of the elliptic equation
  int max_iter = 60;             // Newton steps
  int max_monotone_iter = 10000;
  int max_linear_iter = 500;     // inner conjugate-gradient steps
  std::optional<double> lambda;  // monotone shift; default 2 exp(K+)
  double monotone_slack = 1e-13;
  std::optional<ScalarField> warm_start;

  void validate() const;
};

struct PoissonDiagnostics {
  double c_inf = 0.0;  // min(1, inf(1+n)); see energy_lhs
  double I1 = 0.0;     // |n|^2 / c_inf + |n|_{H^1}^2
  double bound_lo = 0.0;
  double bound_hi = 0.0;
  bool bounds_apply = false;  // |n|_inf < 1
  double energy_lhs = 0.0;
  int iterations = 0;
  double residual = 0.0;
};

struct PoissonResult {
  ScalarField phi;
  PoissonDiagnostics diag;
};

/// -Delta phi + e^phi - 1 = n. Newton with a preconditioned CG inner solve.
PoissonResult solve_unscaled(const ScalarField& n, const SolverConfig& cfg = {});

/// -eps^2 Delta phi + e^(eps phi) - 1 = eps n, eps in (0, 1].
PoissonResult solve_scaled(const ScalarField& n, double eps, const SolverConfig& cfg = {});

/// Sub/super-solution iteration (-Delta + lambda) psi = lambda phi - (e^phi - 1) + n
/// started from phi_0 = ln(1 - |n|_inf). Throws MonotonicityViolated when an
/// iterate decreases anywhere by more than cfg.monotone_slack.
PoissonResult monotone_solve(const ScalarField& n, const SolverConfig& cfg = {});

/// M_eps(phi) u = -eps Delta u + e^(eps phi) u.
ScalarField apply_M(const ScalarField& phi, const ScalarField& u, double eps);

/// Solves M_eps(phi) u = v to cfg.tol in L2.
ScalarField invert_M(const ScalarField& phi, const ScalarField& v, double eps, const SolverConfig& cfg = {});

/// Unscaled residual -Delta phi + e^phi - 1 - n.
ScalarField poisson_residual(const ScalarField& phi, const ScalarField& n);

/// int (c/2) phi^2 + |grad phi|^2/2 + |Delta phi|^2 + 2 e^phi |grad phi|^2 + (e^phi - 1)^2/2.
double energy_functional(const ScalarField& phi, double c_inf);

/// Fills c_inf, I1, the pointwise bounds and the energy of a computed phi.
PoissonDiagnostics unscaled_diagnostics(const ScalarField& n, const ScalarField& phi);

}  // namespace zkl
