#pragma once

#include <array>
#include <vector>

namespace zkl {

/// Plane-wave relation of the cold system linearized about n = 1, v = 0:
///   omega^4 - omega^2 (a^2 + K/(1+K)) + a^2 k1^2/(1+K) = 0,  K = |k|^2.
/// Both roots in omega^2 are real and >= 0 (acoustic and cyclotron branches);
/// they are sorted ascending. A negative root from rounding is flagged.
struct DispersionRoots {
  std::array<double, 3> k{};
  double a = 0.0;
  std::array<double, 2> omega_sq{};
  std::array<bool, 2> propagating{};  // omega^2 >= 0
  double residual = 0.0;              // worst relative residual of the quartic
};

DispersionRoots dispersion_roots(const std::array<double, 3>& k, double a);

/// (1+K) - k1^2/omega^2 - |k_perp|^2/(omega^2 - a^2), relative to 1+K.
/// Throws ResonantRoot when omega^2 is 0 or a^2.
double equivalent_form_residual(const std::array<double, 3>& k, double a, double omega_sq);

struct EquivalentFormReport {
  int checked = 0;
  int resonant = 0;  // propagating roots skipped because omega^2 is 0 or a^2
  double max_residual = 0.0;
};

/// Checks the equivalent form on every propagating, non-resonant root.
/// Throws ResonantRoot when no propagating root can be checked.
EquivalentFormReport verify_equivalent_form(const DispersionRoots& roots);

}  // namespace zkl
