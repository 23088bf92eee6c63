#include "zklab/poisson.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "zklab/spectral.hpp"

namespace zkl {
namespace {

void check_floor(const ScalarField& n, double eps) {
  const double floor = 1.0 + eps * min_value(n);
  if (!(floor > 0.0)) {
    throw Error(ErrorKind::DensityFloorViolated, "inf(1 + eps n) = " + std::to_string(floor) + " <= 0");
  }
}

// -eps Delta u + w u
ScalarField apply_weighted(const ScalarField& w, const ScalarField& u, double eps) {
  const auto k2 = u.grid().k_squared();
  ScalarField out = apply_multiplier(u, [&](std::size_t i) { return Complex(eps * k2[i], 0.0); });
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += w[i] * u[i];
  return out;
}

// Preconditioned CG for (-eps Delta + w) u = b; the preconditioner is the
// constant-coefficient operator with w replaced by its mean.
ScalarField pcg(const ScalarField& w, const ScalarField& b, double eps, double target, int max_iter, int* iters) {
  const Grid& g = b.grid();
  const double m = mean(w);
  const auto k2 = g.k_squared();
  auto precondition = [&](const ScalarField& r) {
    return apply_multiplier(r, [&](std::size_t i) { return Complex(1.0 / (eps * k2[i] + m), 0.0); });
  };

  ScalarField u = precondition(b);
  ScalarField r = b - apply_weighted(w, u, eps);
  const double floor = 1e-14 * l2_norm(b);
  target = std::max(target, floor);
  ScalarField z = precondition(r);
  ScalarField p = z;
  double rz = inner(r, z);
  int it = 0;
  double rn = l2_norm(r);
  while (rn > target) {
    if (it >= max_iter) {
      throw Error(ErrorKind::NoConvergence,
                  "linear solve stalled at residual " + std::to_string(rn) + " after " + std::to_string(it) + " steps");
    }
    const ScalarField q = apply_weighted(w, p, eps);
    const double alpha = rz / inner(p, q);
    u.axpy(alpha, p);
    r.axpy(-alpha, q);
    rn = l2_norm(r);
    z = precondition(r);
    const double rz_new = inner(r, z);
    const double beta = rz_new / rz;
    rz = rz_new;
    for (std::size_t i = 0; i < p.size(); ++i) p[i] = z[i] + beta * p[i];
    ++it;
  }
  if (iters) *iters = it;
  return u;
}

// -eps^2 Delta phi + expm1(eps phi) - eps n
ScalarField scaled_residual(const ScalarField& phi, const ScalarField& n, double eps) {
  const auto k2 = phi.grid().k_squared();
  ScalarField out = apply_multiplier(phi, [&](std::size_t i) { return Complex(eps * eps * k2[i], 0.0); });
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += std::expm1(eps * phi[i]) - eps * n[i];
  return out;
}

ScalarField newton(const ScalarField& n, double eps, const SolverConfig& cfg, int* iterations, double* residual) {
  ScalarField phi;
  if (cfg.warm_start) {
    n.check_same(*cfg.warm_start);
    phi = *cfg.warm_start;
  } else {
    phi = n.map([eps](double v) { return std::log1p(eps * v) / eps; });
  }

  ScalarField F = scaled_residual(phi, n, eps);
  double r = l2_norm(F);
  int it = 0;
  while (r > cfg.tol) {
    if (it >= cfg.max_iter) {
      throw Error(ErrorKind::NoConvergence, "Newton residual " + std::to_string(r) + " after " +
                                                std::to_string(it) + " iterations");
    }
    // J = eps M_eps(phi), so J delta = -F is M delta = -F / eps.
    const ScalarField w = phi.map([eps](double v) { return std::exp(eps * v); });
    const double target = std::max(0.01 * cfg.tol, 1e-4 * r) / eps;
    const ScalarField delta = pcg(w, (-1.0 / eps) * F, eps, target, cfg.max_linear_iter, nullptr);

    double step = 1.0;
    ScalarField trial;
    ScalarField F_trial;
    double r_trial = 0.0;
    for (int halvings = 0;; ++halvings) {
      trial = phi;
      trial.axpy(step, delta);
      F_trial = scaled_residual(trial, n, eps);
      r_trial = l2_norm(F_trial);
      if (r_trial < (1.0 - 1e-4 * step) * r || halvings == 30) break;
      step *= 0.5;
    }
    if (!(r_trial < r)) {
      throw Error(ErrorKind::NoConvergence, "Newton stagnated at residual " + std::to_string(r));
    }
    phi = std::move(trial);
    F = std::move(F_trial);
    r = r_trial;
    ++it;
  }
  *iterations = it;
  *residual = r;
  return phi;
}

}  // namespace

void SolverConfig::validate() const {
  if (!(tol > 0.0)) throw Error(ErrorKind::InvalidArgument, "solver tolerance must be positive");
  if (max_iter < 1 || max_monotone_iter < 1 || max_linear_iter < 1) {
    throw Error(ErrorKind::InvalidArgument, "iteration limits must be positive");
  }
}

ScalarField poisson_residual(const ScalarField& phi, const ScalarField& n) {
  return scaled_residual(phi, n, 1.0);
}

double energy_functional(const ScalarField& phi, double c_inf) {
  const Grid& g = phi.grid();
  double grad2 = 0.0;
  double weighted = 0.0;
  for (int j = 0; j < g.dim(); ++j) {
    const ScalarField d = derivative(phi, j);
    grad2 += inner(d, d);
    for (std::size_t i = 0; i < d.size(); ++i) weighted += std::exp(phi[i]) * d[i] * d[i];
  }
  weighted *= g.cell_volume();
  const double lap2 = std::pow(l2_norm(laplacian(phi)), 2);
  const double e2 = std::pow(l2_norm(phi.map([](double v) { return std::expm1(v); })), 2);
  return 0.5 * c_inf * inner(phi, phi) + 0.5 * grad2 + lap2 + 2.0 * weighted + 0.5 * e2;
}

PoissonDiagnostics unscaled_diagnostics(const ScalarField& n, const ScalarField& phi) {
  PoissonDiagnostics d;
  const double ninf = max_abs(n);
  d.c_inf = std::min(1.0, 1.0 + min_value(n));
  const double n2 = inner(n, n);
  const double h1 = std::pow(sobolev_norm(n, 1.0), 2);
  d.I1 = n2 / d.c_inf + h1;
  d.bounds_apply = ninf < 1.0;
  if (d.bounds_apply) {
    d.bound_lo = std::log1p(-ninf);
    d.bound_hi = std::log1p(ninf);
  }
  d.energy_lhs = energy_functional(phi, d.c_inf);
  d.residual = l2_norm(poisson_residual(phi, n));
  return d;
}

PoissonResult solve_unscaled(const ScalarField& n, const SolverConfig& cfg) {
  cfg.validate();
  check_floor(n, 1.0);
  PoissonResult out;
  int iterations = 0;
  double residual = 0.0;
  out.phi = newton(n, 1.0, cfg, &iterations, &residual);
  out.diag = unscaled_diagnostics(n, out.phi);
  out.diag.iterations = iterations;
  out.diag.residual = residual;
  return out;
}

PoissonResult solve_scaled(const ScalarField& n, double eps, const SolverConfig& cfg) {
  if (!(eps > 0.0 && eps <= 1.0)) throw Error(ErrorKind::InvalidArgument, "eps must lie in (0, 1]");
  cfg.validate();
  check_floor(n, eps);
  PoissonResult out;
  out.phi = newton(n, eps, cfg, &out.diag.iterations, &out.diag.residual);
  // Bounds in scaled units; the energy fields belong to the unscaled problem.
  const double ninf = eps * max_abs(n);
  out.diag.c_inf = std::min(1.0, 1.0 + eps * min_value(n));
  out.diag.bounds_apply = ninf < 1.0;
  if (out.diag.bounds_apply) {
    out.diag.bound_lo = std::log1p(-ninf) / eps;
    out.diag.bound_hi = std::log1p(ninf) / eps;
  }
  return out;
}

PoissonResult monotone_solve(const ScalarField& n, const SolverConfig& cfg) {
  cfg.validate();
  const double ninf = max_abs(n);
  if (!(ninf < 1.0)) throw Error(ErrorKind::InvalidArgument, "monotone iteration needs |n|_inf < 1");
  const double k_minus = -std::log1p(-ninf);
  const double k_plus = std::log1p(ninf);
  const double lambda = cfg.lambda.value_or(2.0 * std::exp(k_plus));
  if (!(lambda > std::exp(k_plus))) {
    throw Error(ErrorKind::InvalidArgument, "lambda must exceed exp(K+) = " + std::to_string(std::exp(k_plus)));
  }

  const Grid& g = n.grid();
  const auto k2 = g.k_squared();
  ScalarField phi(n.grid_ptr(), -k_minus);
  const double slack = cfg.monotone_slack;
  double r = l2_norm(poisson_residual(phi, n));
  int it = 0;
  while (r > cfg.tol) {
    if (it >= cfg.max_monotone_iter) {
      throw Error(ErrorKind::NoConvergence, "monotone iteration residual " + std::to_string(r) + " after " +
                                                std::to_string(it) + " iterations");
    }
    ScalarField rhs(n.grid_ptr());
    for (std::size_t i = 0; i < rhs.size(); ++i) rhs[i] = lambda * phi[i] - std::expm1(phi[i]) + n[i];
    ScalarField next = apply_multiplier(rhs, [&](std::size_t i) { return Complex(1.0 / (k2[i] + lambda), 0.0); });
    for (std::size_t i = 0; i < next.size(); ++i) {
      if (next[i] < phi[i] - slack) {
        throw Error(ErrorKind::MonotonicityViolated, "iterate " + std::to_string(it + 1) + " decreased by " +
                                                         std::to_string(phi[i] - next[i]));
      }
      if (next[i] > k_plus + slack || next[i] < -k_minus - slack) {
        throw Error(ErrorKind::MonotonicityViolated, "iterate left [-K-, K+]");
      }
    }
    phi = std::move(next);
    r = l2_norm(poisson_residual(phi, n));
    ++it;
  }
  PoissonResult out;
  out.phi = std::move(phi);
  out.diag = unscaled_diagnostics(n, out.phi);
  out.diag.iterations = it;
  return out;
}

ScalarField apply_M(const ScalarField& phi, const ScalarField& u, double eps) {
  phi.check_same(u);
  const ScalarField w = phi.map([eps](double v) { return std::exp(eps * v); });
  return apply_weighted(w, u, eps);
}

ScalarField invert_M(const ScalarField& phi, const ScalarField& v, double eps, const SolverConfig& cfg) {
  if (!(eps > 0.0)) throw Error(ErrorKind::InvalidArgument, "eps must be positive");
  cfg.validate();
  phi.check_same(v);
  const ScalarField w = phi.map([eps](double x) { return std::exp(eps * x); });
  return pcg(w, v, eps, cfg.tol, cfg.max_linear_iter, nullptr);
}

}  // namespace zkl
