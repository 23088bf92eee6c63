#pragma once

#include <array>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "zklab/field.hpp"
#include "zklab/plasma.hpp"
#include "zklab/zk.hpp"

namespace zkl {

/// Profiles of the long-wave expansion
///   n = n1 + eps n2,  phi = phi1 + eps phi2,  v_x = vx1 + eps vx2,
///   v_y = sqrt(eps) vy1 + eps vy2,  v_z = sqrt(eps) vz1 + eps vz2,
/// all functions of (X, y, z) = (x - c t, y, z) at slow time T = eps t.
struct ProfileSet {
  ScalarField n1, n2, phi1, phi2, vx1, vx2, vy1, vy2, vz1, vz2;
  ScalarField ndot;  // d_T n1
  double c = 1.0;
  double a = 1.0;
  double alpha = 0.0;
  double T = 0.0;
  double vx2_mismatch = 0.0;  // disagreement of the two routes to vx2
};

/// Cold plasma: phi1 = vx1 = n1, vy1 = -d_z n1 / a, vz1 = d_y n1 / a,
/// (vy2, vz2) = d_X (d_y, d_z) n1 / a^2, phi2 = d_XX n1 / a^2,
/// n2 = phi2 - Delta n1 + n1^2 / 2.
/// `ndot` defaults to the ZK right-hand side; a supplied value is checked
/// through the two independent routes to vx2 (InconsistentProfiles).
ProfileSet build_cold_profiles(const ScalarField& n1, double a, double T = 0.0,
                               const std::optional<ScalarField>& ndot = std::nullopt);

/// Isothermal pressure alpha >= 0, c = sqrt(1 + alpha), beta = 1 + alpha:
/// vx1 = c n1, (vy1, vz1) = beta (-d_z, d_y) n1 / a, (vy2, vz2) = c beta d_X (d_y, d_z) n1 / a^2,
/// phi2 = beta d_XX n1 / a^2 + (alpha / beta) Delta n1.
ProfileSet build_isothermal_profiles(const ScalarField& n1, double a, double alpha, double T = 0.0,
                                     const std::optional<ScalarField>& ndot = std::nullopt);

/// The ansatz at fast time t. Throws FrameMismatch unless p.T = eps t.
PlasmaState evaluate_ansatz(const ProfileSet& p, double eps, double t);

struct ResidualReport {
  double eps = 0.0;
  double s = 0.0;
  double N_norm = 0.0;
  std::array<double, 3> R_norms{};
  double r_norm = 0.0;
  double R_perp() const;  // combined transverse components
};

/// Substitutes the ansatz into the scaled equations (cold or isothermal as
/// p.alpha dictates) and reports H^s norms of the three residuals. Time
/// derivatives use d_t = -c d_X + eps d_T with d_T n1 = p.ndot.
ResidualReport residuals(const ProfileSet& p, double eps, double s = 0.0);

struct CancellationReport {
  std::vector<std::pair<std::string, double>> terms;  // name, L2 norm
  double scale = 0.0;                                 // max(|n1|_2, tiny)
  double max_relative() const;
  bool ok(double tol = 1e-9) const { return max_relative() <= tol; }
};

/// Norms of N0, N1, N2, R^j_0, R^j_1, R^j_2 and r2, r4.
CancellationReport order12_cancellation_check(const ProfileSet& p);

/// Largest relative deviation of the stored fields from a fresh
/// construction out of p.n1 and p.ndot.
double profile_invariant_deviation(const ProfileSet& p);

}  // namespace zkl
