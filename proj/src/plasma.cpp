#include "zklab/plasma.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "zklab/spectral.hpp"

namespace zkl {
namespace {

// e^u (u - 1) + 1 without cancellation near u = 0.
double energy_density(double u) {
  if (std::abs(u) < 0.1) {
    double term = u * u / 2.0;  // u^k / k!
    double sum = 0.0;
    for (int k = 2; k < 24; ++k) {
      sum += (k - 1) * term;
      term *= u / (k + 1);
    }
    return sum;
  }
  return std::exp(u) * (u - 1.0) + 1.0;
}

Tendency rhs_impl(const PlasmaState& s, const PlasmaParams& p, bool with_rotation) {
  const GridPtr& gp = s.n.grid_ptr();
  const Grid& g = *gp;
  const int d = g.dim();
  const double eps = p.eps;
  const auto keep = g.dealias_mask();

  // dn/dt = -div((1 + eps n) v)
  Spectrum dn_hat(g.spectral_size(), 0.0);
  for (int j = 0; j < d; ++j) {
    ScalarField flux = s.v[j];
    for (std::size_t i = 0; i < flux.size(); ++i) flux[i] += eps * s.n[i] * s.v[j][i];
    const Spectrum f = g.forward(flux.values());
    const auto k = g.k(j);
    const auto nyq = g.nyquist(j);
    for (std::size_t i = 0; i < f.size(); ++i) {
      if (keep[i] && !nyq[i]) dn_hat[i] -= Complex(0.0, k[i]) * f[i];
    }
  }

  Tendency out;
  out.dn = from_spectrum(gp, dn_hat);
  out.dv = VectorField(gp);

  const Spectrum phi_hat = g.forward(s.phi.values());
  std::vector<ScalarField> dn_dx;
  if (p.isothermal) {
    for (int j = 0; j < d; ++j) dn_dx.push_back(derivative(s.n, j));
  }
  for (std::size_t c = 0; c < s.v.size(); ++c) {
    // eps (v . grad) v_c + alpha d_c n / (1 + eps n), assembled pointwise.
    ScalarField local(gp);
    for (int j = 0; j < d; ++j) {
      const ScalarField dvc = derivative(s.v[c], j);
      for (std::size_t i = 0; i < local.size(); ++i) local[i] += eps * s.v[j][i] * dvc[i];
    }
    if (p.isothermal && static_cast<int>(c) < d) {
      for (std::size_t i = 0; i < local.size(); ++i) local[i] += p.alpha * dn_dx[c][i] / (1.0 + eps * s.n[i]);
    }
    Spectrum h = g.forward(local.values());
    if (static_cast<int>(c) < d) {
      const auto k = g.k(static_cast<int>(c));
      const auto nyq = g.nyquist(static_cast<int>(c));
      for (std::size_t i = 0; i < h.size(); ++i) {
        if (!nyq[i]) h[i] += Complex(0.0, k[i]) * phi_hat[i];
      }
    }
    for (std::size_t i = 0; i < h.size(); ++i) h[i] = keep[i] ? -h[i] : Complex(0.0);
    out.dv[c] = from_spectrum(gp, h);
  }

  if (with_rotation && s.v.size() == 3) {
    const double omega = p.a / std::sqrt(eps);
    out.dv[1].axpy(omega, s.v[2]);
    out.dv[2].axpy(-omega, s.v[1]);
  }
  return out;
}

void check_density_floor(const ScalarField& n, const PlasmaParams& p) {
  const double floor = 1.0 + p.eps * min_value(n);
  if (!(floor >= 0.5 * p.c0)) {
    throw Error(ErrorKind::DensityFloorViolated,
                "inf(1 + eps n) = " + std::to_string(floor) + " < c0/2 = " + std::to_string(0.5 * p.c0));
  }
}

PlasmaState advance(const PlasmaState& base, const Tendency& k, double h) {
  PlasmaState s;
  s.n = base.n;
  s.n.axpy(h, k.dn);
  s.v = base.v;
  s.v.axpy(h, k.dv);
  s.phi = base.phi;
  s.t = base.t;
  return s;
}

}  // namespace

void PlasmaParams::validate(int dim) const {
  if (!(eps > 0.0 && eps <= 1.0)) throw Error(ErrorKind::InvalidArgument, "eps must lie in (0, 1]");
  if (!(a >= 0.0) || !std::isfinite(a)) throw Error(ErrorKind::InvalidArgument, "a must be >= 0");
  if (!(alpha >= 0.0) || !std::isfinite(alpha)) throw Error(ErrorKind::InvalidArgument, "alpha must be >= 0");
  if (alpha > 0.0 && !isothermal) throw Error(ErrorKind::InvalidArgument, "alpha > 0 needs the isothermal model");
  if (!(c0 > 0.0)) throw Error(ErrorKind::InvalidArgument, "c0 must be positive");
  if (dim < 1 || dim > 3) throw Error(ErrorKind::InvalidArgument, "dimension must be 1, 2 or 3");
}

PlasmaState rest_state(const GridPtr& grid) {
  return {ScalarField(grid), VectorField(grid), ScalarField(grid), 0.0};
}

void enforce_poisson(PlasmaState& state, const PlasmaParams& p, const SolverConfig& cfg) {
  SolverConfig c = cfg;
  if (!state.phi.empty() && state.phi.grid().same_shape(state.n.grid())) c.warm_start = state.phi;
  state.phi = solve_scaled(state.n, p.eps, c).phi;
}

Tendency rhs(const PlasmaState& state, const PlasmaParams& p) {
  p.validate(state.n.grid().dim());
  return rhs_impl(state, p, true);
}

VectorField rotation_substep(const VectorField& v, double dt, const PlasmaParams& p) {
  if (v.size() != 3) return v;
  const double theta = p.a / std::sqrt(p.eps) * dt;
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  VectorField out = v;
  for (std::size_t i = 0; i < v[1].size(); ++i) {
    const double vy = v[1][i];
    const double vz = v[2][i];
    out[1][i] = c * vy + s * vz;
    out[2][i] = -s * vy + c * vz;
  }
  return out;
}

double cfl_limit(const PlasmaState& state, const PlasmaParams& p) {
  double vmax = 0.0;
  for (std::size_t i = 0; i < state.n.size(); ++i) {
    double s2 = 0.0;
    for (const auto& c : state.v) s2 += c[i] * c[i];
    vmax = std::max(vmax, std::sqrt(s2));
  }
  return 0.4 * state.n.grid().min_spacing() / (1.0 + p.eps * vmax + std::sqrt(1.0 + p.alpha));
}

PlasmaState step(const PlasmaState& state, double dt, const PlasmaParams& p, const SolverConfig& cfg) {
  p.validate(state.n.grid().dim());
  const double limit = cfl_limit(state, p);
  if (std::abs(dt) > limit * (1.0 + 1e-12)) {
    throw Error(ErrorKind::CFLViolation, "dt = " + std::to_string(dt) + " exceeds " + std::to_string(limit));
  }

  PlasmaState s = state;
  s.v = rotation_substep(s.v, 0.5 * dt, p);

  const Tendency k1 = rhs_impl(s, p, false);
  PlasmaState s2 = advance(s, k1, 0.5 * dt);
  enforce_poisson(s2, p, cfg);
  const Tendency k2 = rhs_impl(s2, p, false);
  PlasmaState s3 = advance(s, k2, 0.5 * dt);
  s3.phi = s2.phi;
  enforce_poisson(s3, p, cfg);
  const Tendency k3 = rhs_impl(s3, p, false);
  PlasmaState s4 = advance(s, k3, dt);
  s4.phi = s3.phi;
  enforce_poisson(s4, p, cfg);
  const Tendency k4 = rhs_impl(s4, p, false);

  PlasmaState out = s;
  out.n.axpy(dt / 6.0, k1.dn).axpy(dt / 3.0, k2.dn).axpy(dt / 3.0, k3.dn).axpy(dt / 6.0, k4.dn);
  out.v.axpy(dt / 6.0, k1.dv).axpy(dt / 3.0, k2.dv).axpy(dt / 3.0, k3.dv).axpy(dt / 6.0, k4.dv);
  out.v = rotation_substep(out.v, 0.5 * dt, p);
  out.phi = s4.phi;
  out.t = state.t + dt;
  check_density_floor(out.n, p);
  enforce_poisson(out, p, cfg);
  return out;
}

HamiltonianValue hamiltonian(const PlasmaState& s, const PlasmaParams& p) {
  const Grid& g = s.n.grid();
  const int d = g.dim();
  const double eps = p.eps;
  double kinetic = 0.0;
  double potential = 0.0;
  for (std::size_t i = 0; i < s.n.size(); ++i) {
    double v2 = 0.0;
    for (const auto& c : s.v) v2 += c[i] * c[i];
    kinetic += 0.5 * (1.0 + eps * s.n[i]) * v2;
    potential += energy_density(eps * s.phi[i]) / (eps * eps);
  }
  double grad = 0.0;
  for (int j = 0; j < d; ++j) {
    const ScalarField dphi = derivative(s.phi, j);
    grad += inner(dphi, dphi);
  }
  HamiltonianValue h;
  h.scaled = (kinetic + potential) * g.cell_volume() + 0.5 * eps * grad;
  h.raw = h.scaled * std::pow(eps, 2.0 - 0.5 * d);
  return h;
}

std::array<double, 3> impulse(const PlasmaState& s, const PlasmaParams& p) {
  std::array<double, 3> out{};
  const double dv = s.n.grid().cell_volume();
  for (std::size_t c = 0; c < s.v.size(); ++c) {
    double sum = 0.0;
    for (std::size_t i = 0; i < s.n.size(); ++i) sum += (1.0 + p.eps * s.n[i]) * s.v[c][i];
    out[c] = sum * dv;
  }
  return out;
}

ConservationRecord conservation_record(const PlasmaState& s, const PlasmaParams& p, double norm_s) {
  ConservationRecord r;
  r.t = s.t;
  r.H = p.alpha > 0.0 ? std::numeric_limits<double>::quiet_NaN() : hamiltonian(s, p).scaled;
  r.P = impulse(s, p);
  r.l2_n = l2_norm(s.n);
  r.l2_v = l2_norm(s.v);
  r.hs_n = sobolev_norm(s.n, norm_s);
  r.hseps_v = hs_eps_norm(s.v, norm_s, p.eps);
  return r;
}

SimulationResult simulate(const PlasmaState& initial, const PlasmaParams& p, const SimulationConfig& cfg) {
  p.validate(initial.n.grid().dim());
  if (!(cfg.horizon >= 0.0)) throw Error(ErrorKind::InvalidArgument, "horizon must be >= 0");
  if (!(cfg.dt > 0.0)) throw Error(ErrorKind::InvalidArgument, "dt must be positive");

  SimulationResult res;
  PlasmaState s = initial;
  enforce_poisson(s, p, cfg.poisson);
  res.log.push_back(conservation_record(s, p, cfg.norm_s));
  const bool snap = cfg.snapshot_every > 0.0;
  double next_snapshot = 0.0;
  if (snap) {
    res.snapshots.push_back(s);
    next_snapshot = s.t + cfg.snapshot_every;
  }

  const long steps = cfg.horizon == 0.0 ? 0 : std::max(1L, static_cast<long>(std::ceil(cfg.horizon / cfg.dt - 1e-9)));
  const double h = steps ? cfg.horizon / static_cast<double>(steps) : 0.0;
  const double t0 = s.t;
  for (long k = 1; k <= steps; ++k) {
    try {
      PlasmaState next = step(s, h, p, cfg.poisson);
      next.t = t0 + static_cast<double>(k) * h;
      s = std::move(next);
    } catch (const Error& e) {
      if (cfg.stop_on_error) throw;
      res.aborted = true;
      res.abort_kind = e.kind();
      res.abort_reason = e.what();
      break;
    }
    ++res.steps;
    res.log.push_back(conservation_record(s, p, cfg.norm_s));
    if (snap && s.t >= next_snapshot - 1e-9 * h) {
      res.snapshots.push_back(s);
      next_snapshot += cfg.snapshot_every;
    }
  }
  res.final_state = std::move(s);
  return res;
}

}  // namespace zkl
