#include "zklab/zk.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "zklab/spectral.hpp"

namespace zkl {

ZKCoefficients zk_coeffs(double a, double alpha) {
  if (!(a > 0.0) || !std::isfinite(a)) throw Error(ErrorKind::InvalidArgument, "ZK coefficients need a > 0");
  if (!(alpha >= 0.0) || !std::isfinite(alpha)) throw Error(ErrorKind::InvalidArgument, "alpha must be >= 0");
  ZKCoefficients k;
  const double beta = 1.0 + alpha;
  k.c = std::sqrt(beta);
  k.advect = k.c;
  k.disp_long = 1.0 / (2.0 * k.c);
  k.disp_perp = (1.0 + beta * beta / (a * a)) / (2.0 * k.c);
  k.a = a;
  k.alpha = alpha;
  return k;
}

double zk_symbol(const ZKCoefficients& c, double kx, double kperp_sq) {
  return kx * (c.disp_long * kx * kx + c.disp_perp * kperp_sq);
}

ScalarField zk_rhs(const ScalarField& n1, const ZKCoefficients& c) {
  const Grid& g = n1.grid();
  const auto kx = g.k(0);
  const auto k2 = g.k_squared();
  const auto nyq = g.nyquist(0);
  const auto keep = g.dealias_mask();
  const Spectrum n_hat = spectrum(n1);
  const Spectrum sq_hat = g.forward(n1.map([](double v) { return 0.5 * v * v; }).values());
  Spectrum out(n_hat.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (nyq[i]) {
      out[i] = 0.0;
      continue;
    }
    const double w = zk_symbol(c, kx[i], k2[i] - kx[i] * kx[i]);
    Complex v = Complex(0.0, w) * n_hat[i];
    if (keep[i]) v -= c.advect * Complex(0.0, kx[i]) * sq_hat[i];
    out[i] = v;
  }
  return from_spectrum(n1.grid_ptr(), out);
}

double invariant_M(const ScalarField& n1) { return inner(n1, n1); }

double invariant_H(const ScalarField& n1, const ZKCoefficients& c) {
  const Grid& g = n1.grid();
  const ScalarField dx = derivative(n1, 0);
  double perp = 0.0;
  for (int j = 1; j < g.dim(); ++j) {
    const ScalarField d = derivative(n1, j);
    perp += inner(d, d);
  }
  double cubic = 0.0;
  for (double v : n1.values()) cubic += v * v * v;
  cubic *= g.cell_volume();
  return 0.5 * c.disp_long * inner(dx, dx) + 0.5 * c.disp_perp * perp - c.advect * cubic / 6.0;
}

ScalarField invariant_H_gradient(const ScalarField& n1, const ZKCoefficients& c) {
  ScalarField out = (-c.disp_long) * partial(n1, {2, 0, 0});
  out.axpy(-c.disp_perp, laplacian_perp(n1));
  for (std::size_t i = 0; i < out.size(); ++i) out[i] -= 0.5 * c.advect * n1[i] * n1[i];
  return out;
}

double zk_cfl_limit(const ScalarField& n1, const ZKCoefficients& c) {
  const double m = std::abs(c.advect) * max_abs(n1);
  if (m == 0.0) return std::numeric_limits<double>::infinity();
  return 0.5 * n1.grid().min_spacing() / m;
}

ZKIntegrator::ZKIntegrator(const ScalarField& n0, const ZKCoefficients& c, double T0, bool nonlinear)
    : grid_(n0.grid_ptr()), coeffs_(c), nonlinear_(nonlinear), T_(T0), hat_(zkl::spectrum(n0)) {
  if (!n0.all_finite()) throw Error(ErrorKind::InvalidArgument, "non-finite ZK initial data");
  const auto kx = grid_->k(0);
  const auto k2 = grid_->k_squared();
  const auto nyq = grid_->nyquist(0);
  omega_.resize(hat_.size());
  ikx_.resize(hat_.size());
  for (std::size_t i = 0; i < hat_.size(); ++i) {
    const bool drop = nyq[i] != 0;
    omega_[i] = drop ? 0.0 : zk_symbol(c, kx[i], k2[i] - kx[i] * kx[i]);
    ikx_[i] = drop ? 0.0 : kx[i];
  }
}

Spectrum ZKIntegrator::nonlinear_term(const Spectrum& v) const {
  Spectrum out(v.size(), 0.0);
  if (!nonlinear_) return out;
  std::vector<double> n = grid_->inverse(v);
  for (double& x : n) x = 0.5 * x * x;
  Spectrum sq = grid_->forward(n);
  const auto keep = grid_->dealias_mask();
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (keep[i]) out[i] = -coeffs_.advect * Complex(0.0, ikx_[i]) * sq[i];
  }
  return out;
}

void ZKIntegrator::step(double dT) {
  if (nonlinear_) {
    const ScalarField n(grid_, grid_->inverse(hat_));
    const double limit = zk_cfl_limit(n, coeffs_);
    if (std::abs(dT) > limit) {
      throw Error(ErrorKind::CFLViolation, "dT = " + std::to_string(dT) + " exceeds " + std::to_string(limit));
    }
  }
  const std::size_t m = hat_.size();
  Spectrum e(m), e2(m);
  for (std::size_t i = 0; i < m; ++i) {
    e[i] = std::polar(1.0, 0.5 * omega_[i] * dT);
    e2[i] = e[i] * e[i];
  }
  const Spectrum a = nonlinear_term(hat_);
  Spectrum tmp(m);
  for (std::size_t i = 0; i < m; ++i) tmp[i] = e[i] * (hat_[i] + 0.5 * dT * a[i]);
  const Spectrum b = nonlinear_term(tmp);
  for (std::size_t i = 0; i < m; ++i) tmp[i] = e[i] * hat_[i] + 0.5 * dT * b[i];
  const Spectrum c = nonlinear_term(tmp);
  for (std::size_t i = 0; i < m; ++i) tmp[i] = e2[i] * hat_[i] + dT * e[i] * c[i];
  const Spectrum d = nonlinear_term(tmp);
  for (std::size_t i = 0; i < m; ++i) {
    hat_[i] = e2[i] * hat_[i] + dT / 6.0 * (e2[i] * a[i] + 2.0 * e[i] * (b[i] + c[i]) + d[i]);
  }
  T_ += dT;
}

ZKState ZKIntegrator::state() const { return {ScalarField(grid_, grid_->inverse(hat_)), T_}; }

double ZKIntegrator::mean() const { return hat_[0].real() / grid_->volume(); }

double ZKIntegrator::M() const {
  const auto w = grid_->hermitian_weight();
  double s = 0.0;
  for (std::size_t i = 0; i < hat_.size(); ++i) s += w[i] * std::norm(hat_[i]);
  return s / grid_->volume();
}

ZKState zk_step(const ZKState& s, double dT, const ZKCoefficients& c) {
  ZKIntegrator integ(s.n1, c, s.T);
  integ.step(dT);
  return integ.state();
}

ZKTrajectory zk_solve(const ScalarField& n0, const ZKCoefficients& c, double T_end, double dT, int save_every) {
  if (!(T_end > 0.0)) throw Error(ErrorKind::InvalidArgument, "T_end must be positive");
  if (!(dT > 0.0)) throw Error(ErrorKind::InvalidArgument, "dT must be positive");
  const long steps = std::max(1L, static_cast<long>(std::ceil(T_end / dT - 1e-9)));
  const double h = T_end / static_cast<double>(steps);
  ZKIntegrator integ(n0, c);
  ZKTrajectory traj;
  auto record = [&] {
    const ZKState s = integ.state();
    traj.log.push_back({s.T, invariant_M(s.n1), invariant_H(s.n1, c), integ.mean()});
    return s;
  };
  ZKState s = record();
  if (save_every > 0) traj.states.push_back(s);
  for (long k = 1; k <= steps; ++k) {
    integ.step(h);
    s = record();
    if ((save_every > 0 && k % save_every == 0) || k == steps) traj.states.push_back(s);
  }
  traj.states.back().T = T_end;
  return traj;
}

}  // namespace zkl
