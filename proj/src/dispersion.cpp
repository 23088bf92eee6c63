#include "zklab/dispersion.hpp"

#include <algorithm>
#include <cmath>

#include "zklab/error.hpp"

namespace zkl {
namespace {

double quartic_residual(double k2, double k1sq, double a, double w) {
  const double b = -(a * a + k2 / (1.0 + k2));
  const double c0 = a * a * k1sq / (1.0 + k2);
  const double scale = std::max({w * w, std::abs(b * w), c0, 1e-300});
  return std::abs(w * w + b * w + c0) / scale;
}

}  // namespace

DispersionRoots dispersion_roots(const std::array<double, 3>& k, double a) {
  if (!std::isfinite(a) || a < 0.0) throw Error(ErrorKind::InvalidArgument, "a must be finite and >= 0");
  DispersionRoots r;
  r.k = k;
  r.a = a;
  const double k1sq = k[0] * k[0];
  const double k2 = k1sq + k[1] * k[1] + k[2] * k[2];
  const double b = -(a * a + k2 / (1.0 + k2));
  const double c0 = a * a * k1sq / (1.0 + k2);
  // b <= 0 and b^2 - 4 c0 >= (a^2 - K/(1+K))^2 >= 0; roots q and c0/q.
  const double disc = std::sqrt(std::max(0.0, b * b - 4.0 * c0));
  const double q = 0.5 * (disc - b);
  double w1 = q;
  double w2 = q != 0.0 ? c0 / q : 0.0;
  if (w1 > w2) std::swap(w1, w2);
  r.omega_sq = {w1, w2};
  r.propagating = {w1 >= 0.0, w2 >= 0.0};
  r.residual = std::max(quartic_residual(k2, k1sq, a, w1), quartic_residual(k2, k1sq, a, w2));
  return r;
}

double equivalent_form_residual(const std::array<double, 3>& k, double a, double omega_sq) {
  const double k1sq = k[0] * k[0];
  const double kperp = k[1] * k[1] + k[2] * k[2];
  const double k2 = k1sq + kperp;
  const double shifted = omega_sq - a * a;
  const double tiny = 1e-14 * std::max(1.0, a * a);
  if (std::abs(omega_sq) <= tiny || std::abs(shifted) <= tiny) {
    throw Error(ErrorKind::ResonantRoot, "omega^2 = 0 or a^2 is excluded from the equivalent form");
  }
  return std::abs((1.0 + k2) - k1sq / omega_sq - kperp / shifted) / (1.0 + k2);
}

EquivalentFormReport verify_equivalent_form(const DispersionRoots& roots) {
  EquivalentFormReport rep;
  for (int i = 0; i < 2; ++i) {
    if (!roots.propagating[i]) continue;
    try {
      rep.max_residual = std::max(rep.max_residual, equivalent_form_residual(roots.k, roots.a, roots.omega_sq[i]));
      ++rep.checked;
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::ResonantRoot) throw;
      ++rep.resonant;
    }
  }
  if (rep.checked == 0) throw Error(ErrorKind::ResonantRoot, "no non-resonant propagating root");
  return rep;
}

}  // namespace zkl
