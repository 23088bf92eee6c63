#include "zklab/profiles.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "zklab/spectral.hpp"

namespace zkl {
namespace {

ScalarField dX(const ScalarField& f) { return partial(f, {1, 0, 0}); }
ScalarField dY(const ScalarField& f) { return partial(f, {0, 1, 0}); }
ScalarField dZ(const ScalarField& f) { return partial(f, {0, 0, 1}); }
ScalarField dXX(const ScalarField& f) { return partial(f, {2, 0, 0}); }
ScalarField dXY(const ScalarField& f) { return partial(f, {1, 1, 0}); }
ScalarField dXZ(const ScalarField& f) { return partial(f, {1, 0, 1}); }

ScalarField square_half(const ScalarField& f) {
  return f.map([](double v) { return 0.5 * v * v; });
}

// Drops the k_x = 0 modes (and the x-Nyquist mode), i.e. everything an
// antiderivative in X cannot see.
ScalarField without_x_mean(const ScalarField& f) {
  const Grid& g = f.grid();
  const auto kx = g.k(0);
  const auto nyq = g.nyquist(0);
  return apply_multiplier(f, [&](std::size_t i) { return (kx[i] == 0.0 || nyq[i]) ? Complex(0.0) : Complex(1.0); });
}

// Momentum and density routes to vx2, compared with the closed form.
double vx2_mismatch(const ProfileSet& p) {
  const double c = p.c;
  const double alpha = p.alpha;
  double drop_m = 0.0;
  double drop_d = 0.0;

  ScalarField arg_m = c * p.ndot + dX(square_half(p.n1));
  ScalarField mom = p.phi2 + alpha * p.n2 + integrate_x(arg_m, &drop_m);
  mom *= 1.0 / c;

  ScalarField arg_d = p.ndot + dX(p.n1 * p.vx1) + dY(p.vy2) + dZ(p.vz2);
  ScalarField den = c * p.n2 - integrate_x(arg_d, &drop_d);

  const double routes = l2_norm(without_x_mean(mom - den));
  const double closed = l2_norm(without_x_mean(p.vx2 - mom));
  return std::max(routes, closed) + drop_m + drop_d;
}

void check_inputs(const ScalarField& n1, double a, const std::optional<ScalarField>& ndot) {
  if (n1.empty()) throw Error(ErrorKind::InvalidArgument, "empty n1");
  if (!(a > 0.0) || !std::isfinite(a)) throw Error(ErrorKind::InvalidArgument, "profiles need a > 0");
  if (!n1.all_finite()) throw Error(ErrorKind::InvalidArgument, "non-finite n1");
  if (ndot) n1.check_same(*ndot);
}

void finish(ProfileSet& p, bool supplied) {
  p.vx2_mismatch = vx2_mismatch(p);
  const double limit = 1e-8 * std::max(1.0, l2_norm(p.n1));
  if (supplied && p.vx2_mismatch > limit) {
    throw Error(ErrorKind::InconsistentProfiles, "the two routes to vx2 differ by " + std::to_string(p.vx2_mismatch) +
                                                     "; n1 does not solve the ZK equation with the given d_T n1");
  }
}

// vx2 = (phi2 + alpha n2 - alpha n1^2/2 - (d_XX + k_perp Delta_perp) n1 / 2) / c
ScalarField closed_vx2(const ProfileSet& p, double k_perp) {
  ScalarField inner_sum = dXX(p.n1);
  inner_sum.axpy(k_perp, laplacian_perp(p.n1));
  ScalarField out = p.phi2;
  if (p.alpha != 0.0) {
    out.axpy(p.alpha, p.n2);
    out.axpy(-p.alpha, square_half(p.n1));
  }
  out.axpy(-0.5, inner_sum);
  if (p.c != 1.0) out *= 1.0 / p.c;
  return out;
}

// Time derivatives of the profiles, linear in ndot except for the n1^2 terms.
struct ProfileRates {
  ScalarField n1, n2, phi1, phi2, vx1, vx2, vy1, vy2, vz1, vz2;
};

ProfileRates profile_rates(const ProfileSet& p) {
  const double a = p.a;
  const double alpha = p.alpha;
  const double beta = 1.0 + alpha;
  const double c = p.c;
  const double k_perp = 1.0 + beta * beta / (a * a);
  const ScalarField& m = p.ndot;
  ProfileRates r;
  r.n1 = m;
  r.phi1 = m;
  r.vx1 = c * m;
  r.vy1 = (-beta / a) * dZ(m);
  r.vz1 = (beta / a) * dY(m);
  r.vy2 = (c * beta / (a * a)) * dXY(m);
  r.vz2 = (c * beta / (a * a)) * dXZ(m);
  const ScalarField lap_m = laplacian(m);
  r.phi2 = (beta / (a * a)) * dXX(m);
  r.phi2.axpy(alpha / beta, lap_m);
  r.n2 = r.phi2 - lap_m + p.n1 * m;
  ScalarField s = dXX(m);
  s.axpy(k_perp, laplacian_perp(m));
  r.vx2 = r.phi2;
  r.vx2.axpy(alpha, r.n2);
  r.vx2.axpy(-alpha, p.n1 * m);
  r.vx2.axpy(-0.5, s);
  r.vx2 *= 1.0 / c;
  return r;
}

}  // namespace

ProfileSet build_cold_profiles(const ScalarField& n1, double a, double T, const std::optional<ScalarField>& ndot) {
  check_inputs(n1, a, ndot);
  ProfileSet p;
  p.c = 1.0;
  p.a = a;
  p.alpha = 0.0;
  p.T = T;
  p.n1 = n1;
  p.ndot = ndot ? *ndot : zk_rhs(n1, zk_coeffs(a, 0.0));
  p.phi1 = n1;
  p.vx1 = n1;
  p.vy1 = (-1.0 / a) * dZ(n1);
  p.vz1 = (1.0 / a) * dY(n1);
  p.vy2 = (1.0 / (a * a)) * dXY(n1);
  p.vz2 = (1.0 / (a * a)) * dXZ(n1);
  p.phi2 = (1.0 / (a * a)) * dXX(n1);
  const ScalarField lap = laplacian(n1);
  p.n2 = p.phi2 - lap + square_half(n1);
  p.vx2 = closed_vx2(p, 1.0 + 1.0 / (a * a));
  finish(p, ndot.has_value());
  return p;
}

ProfileSet build_isothermal_profiles(const ScalarField& n1, double a, double alpha, double T,
                                     const std::optional<ScalarField>& ndot) {
  check_inputs(n1, a, ndot);
  if (!(alpha >= 0.0) || !std::isfinite(alpha)) throw Error(ErrorKind::InvalidArgument, "alpha must be >= 0");
  const double beta = 1.0 + alpha;
  ProfileSet p;
  p.c = std::sqrt(beta);
  p.a = a;
  p.alpha = alpha;
  p.T = T;
  p.n1 = n1;
  p.ndot = ndot ? *ndot : zk_rhs(n1, zk_coeffs(a, alpha));
  p.phi1 = n1;
  p.vx1 = p.c * n1;
  p.vy1 = (-beta / a) * dZ(n1);
  p.vz1 = (beta / a) * dY(n1);
  p.vy2 = (p.c * beta / (a * a)) * dXY(n1);
  p.vz2 = (p.c * beta / (a * a)) * dXZ(n1);
  const ScalarField lap = laplacian(n1);
  p.phi2 = (beta / (a * a)) * dXX(n1);
  if (alpha != 0.0) p.phi2.axpy(alpha / beta, lap);
  p.n2 = p.phi2 - lap + square_half(n1);
  p.vx2 = closed_vx2(p, 1.0 + beta * beta / (a * a));
  finish(p, ndot.has_value());
  return p;
}

PlasmaState evaluate_ansatz(const ProfileSet& p, double eps, double t) {
  if (!(eps > 0.0 && eps <= 1.0)) throw Error(ErrorKind::InvalidArgument, "eps must lie in (0, 1]");
  if (std::abs(p.T - eps * t) > 1e-12 * std::max(1.0, std::abs(p.T))) {
    throw Error(ErrorKind::FrameMismatch, "profiles are at T = " + std::to_string(p.T) + " but eps t = " +
                                              std::to_string(eps * t));
  }
  const double d = p.c * t;
  auto at = [d](const ScalarField& f) { return d == 0.0 ? f : shift(f, 0, d); };
  const double se = std::sqrt(eps);
  PlasmaState s;
  s.t = t;
  s.n = at(p.n1);
  s.n.axpy(eps, at(p.n2));
  s.phi = at(p.phi1);
  s.phi.axpy(eps, at(p.phi2));
  s.v = VectorField(p.n1.grid_ptr());
  s.v[0] = at(p.vx1);
  s.v[0].axpy(eps, at(p.vx2));
  if (s.v.size() == 3) {
    s.v[1] = se * at(p.vy1);
    s.v[1].axpy(eps, at(p.vy2));
    s.v[2] = se * at(p.vz1);
    s.v[2].axpy(eps, at(p.vz2));
  }
  return s;
}

double ResidualReport::R_perp() const { return std::hypot(R_norms[1], R_norms[2]); }

ResidualReport residuals(const ProfileSet& p, double eps, double s) {
  if (!(eps > 0.0 && eps <= 1.0)) throw Error(ErrorKind::InvalidArgument, "eps must lie in (0, 1]");
  const GridPtr& gp = p.n1.grid_ptr();
  const int d = gp->dim();
  const double c = p.c;
  const double se = std::sqrt(eps);
  const ProfileRates rate = profile_rates(p);

  // Ansatz and its d_T in the moving frame.
  ScalarField n = p.n1 + eps * p.n2;
  ScalarField nT = rate.n1 + eps * rate.n2;
  ScalarField phi = p.phi1 + eps * p.phi2;
  std::array<ScalarField, 3> v{p.vx1 + eps * p.vx2, se * p.vy1 + eps * p.vy2, se * p.vz1 + eps * p.vz2};
  std::array<ScalarField, 3> vT{rate.vx1 + eps * rate.vx2, se * rate.vy1 + eps * rate.vy2,
                                se * rate.vz1 + eps * rate.vz2};
  auto d_axis = [](const ScalarField& f, int j) {
    std::array<int, 3> o{0, 0, 0};
    o[j] = 1;
    return partial(f, o);
  };

  // Density.
  ScalarField res_n = (-c) * dX(n);
  res_n.axpy(eps, nT);
  for (int j = 0; j < 3; ++j) res_n += d_axis(v[j] + eps * (n * v[j]), j);

  // Velocity; the y and z equations exist only for d >= 2.
  const int ncomp = d == 1 ? 1 : 3;
  std::array<ScalarField, 3> res_v;
  std::array<ScalarField, 3> grad_n;
  for (int j = 0; j < 3; ++j) grad_n[j] = d_axis(n, j);
  const double omega = p.a / se;
  for (int i = 0; i < ncomp; ++i) {
    ScalarField r = (-c) * dX(v[i]);
    r.axpy(eps, vT[i]);
    for (int j = 0; j < 3; ++j) r.axpy(eps, v[j] * d_axis(v[i], j));
    r += d_axis(phi, i);
    if (p.alpha != 0.0) {
      for (std::size_t k = 0; k < r.size(); ++k) r[k] += p.alpha * grad_n[i][k] / (1.0 + eps * n[k]);
    }
    if (i == 1) r.axpy(-omega, v[2]);
    if (i == 2) r.axpy(omega, v[1]);
    res_v[i] = std::move(r);
  }

  // Potential.
  ScalarField res_phi = (eps * eps) * laplacian(phi);
  for (std::size_t k = 0; k < res_phi.size(); ++k) {
    res_phi[k] = -res_phi[k] + std::expm1(eps * phi[k]) - eps * n[k];
  }

  ResidualReport rep;
  rep.eps = eps;
  rep.s = s;
  rep.N_norm = sobolev_norm(res_n, s);
  for (int i = 0; i < ncomp; ++i) rep.R_norms[i] = sobolev_norm(res_v[i], s);
  rep.r_norm = sobolev_norm(res_phi, s);
  return rep;
}

double CancellationReport::max_relative() const {
  double m = 0.0;
  for (const auto& t : terms) m = std::max(m, t.second / scale);
  return m;
}

CancellationReport order12_cancellation_check(const ProfileSet& p) {
  const double c = p.c;
  const double a = p.a;
  const double alpha = p.alpha;
  const ScalarField pressure2 = p.n2 - square_half(p.n1);  // O(eps) part of ln(1 + eps n) / eps

  CancellationReport rep;
  rep.scale = std::max(l2_norm(p.n1), 1e-300);
  auto add = [&](const char* name, const ScalarField& f) { rep.terms.emplace_back(name, l2_norm(f)); };

  add("N0", (-c) * dX(p.n1) + dX(p.vx1));
  add("N1", dY(p.vy1) + dZ(p.vz1));
  add("N2", p.ndot - c * dX(p.n2) + dX(p.n1 * p.vx1) + dX(p.vx2) + dY(p.vy2) + dZ(p.vz2));

  add("R1_0", (-c) * dX(p.vx1) + dX(p.phi1) + alpha * dX(p.n1));
  add("R2_0", dY(p.phi1) + alpha * dY(p.n1) - a * p.vz1);
  add("R3_0", dZ(p.phi1) + alpha * dZ(p.n1) + a * p.vy1);

  add("R1_1", ScalarField(p.n1.grid_ptr()));
  add("R2_1", -(c * dX(p.vy1) + a * p.vz2));
  add("R3_1", (-c) * dX(p.vz1) + a * p.vy2);

  add("R1_2", c * p.ndot - c * dX(p.vx2) + p.vx1 * dX(p.vx1) + dX(p.phi2) + alpha * dX(pressure2));
  add("R2_2", (-c) * dX(p.vy2) + dY(p.phi2 + alpha * pressure2));
  add("R3_2", (-c) * dX(p.vz2) + dZ(p.phi2 + alpha * pressure2));

  add("r2", p.phi1 - p.n1);
  add("r4", (-1.0) * laplacian(p.phi1) + p.phi2 + square_half(p.phi1) - p.n2);
  return rep;
}

double profile_invariant_deviation(const ProfileSet& p) {
  const ProfileSet q = p.alpha > 0.0 ? build_isothermal_profiles(p.n1, p.a, p.alpha, p.T, p.ndot)
                                     : build_cold_profiles(p.n1, p.a, p.T, p.ndot);
  const double scale = std::max(l2_norm(p.n1), 1e-300);
  double m = 0.0;
  const ScalarField ProfileSet::*fields[] = {&ProfileSet::n2,  &ProfileSet::phi1, &ProfileSet::phi2, &ProfileSet::vx1,
                                             &ProfileSet::vx2, &ProfileSet::vy1,  &ProfileSet::vy2,  &ProfileSet::vz1,
                                             &ProfileSet::vz2};
  for (auto f : fields) m = std::max(m, l2_norm(p.*f - q.*f) / scale);
  return m;
}

}  // namespace zkl
