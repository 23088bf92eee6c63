#pragma once

#include <vector>

#include "zklab/field.hpp"

namespace zkl {

/// Coefficients of the normalized equation
///   d_T n + advect n d_X n + d_X (disp_long d_XX + disp_perp Delta_perp) n = 0.
/// The long-wave limit gives advect = c, disp_long = 1/(2c) and
/// disp_perp = (1 + (1+alpha)^2/a^2)/(2c) with c = sqrt(1+alpha).
struct ZKCoefficients {
  double advect = 1.0;
  double disp_long = 0.5;
  double disp_perp = 1.0;
  double c = 1.0;
  double a = 1.0;
  double alpha = 0.0;
};

ZKCoefficients zk_coeffs(double a, double alpha);

struct ZKState {
  ScalarField n1;
  double T = 0.0;
};

/// Linear symbol omega(k) with d_T n_k = i omega n_k for the linear part.
double zk_symbol(const ZKCoefficients& c, double kx, double kperp_sq);

/// Right-hand side d_T n1 (dealiased nonlinearity).
ScalarField zk_rhs(const ScalarField& n1, const ZKCoefficients& c);

double invariant_M(const ScalarField& n1);
/// H = int (disp_long/2) (d_X n)^2 + (disp_perp/2) |grad_perp n|^2 - (advect/6) n^3.
double invariant_H(const ScalarField& n1, const ZKCoefficients& c);
/// Variational derivative of invariant_H.
ScalarField invariant_H_gradient(const ScalarField& n1, const ZKCoefficients& c);

/// Largest admissible step: 0.5 h / (advect max|n1|).
double zk_cfl_limit(const ScalarField& n1, const ZKCoefficients& c);

/// Integrating-factor RK4 (linear part exact in Fourier). The state stays
/// in spectral form between steps.
class ZKIntegrator {
 public:
  ZKIntegrator(const ScalarField& n0, const ZKCoefficients& c, double T0 = 0.0, bool nonlinear = true);

  /// Throws CFLViolation when |dT| exceeds zk_cfl_limit.
  void step(double dT);

  double time() const noexcept { return T_; }
  ZKState state() const;
  const Spectrum& spectrum() const noexcept { return hat_; }
  double mean() const;
  double M() const;

 private:
  Spectrum nonlinear_term(const Spectrum& v) const;

  GridPtr grid_;
  ZKCoefficients coeffs_;
  bool nonlinear_;
  double T_;
  Spectrum hat_;
  std::vector<double> omega_;
  std::vector<double> ikx_;  // k_x, zero on the x-Nyquist mode
};

ZKState zk_step(const ZKState& s, double dT, const ZKCoefficients& c);

struct ZKRecord {
  double T, M, H, mean;
};

struct ZKTrajectory {
  std::vector<ZKState> states;  // every save_every steps, plus the final one
  std::vector<ZKRecord> log;    // every step, starting at T = 0
};

/// Integrates to T_end with the largest step <= dT that divides T_end.
ZKTrajectory zk_solve(const ScalarField& n0, const ZKCoefficients& c, double T_end, double dT, int save_every = 0);

}  // namespace zkl
