#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "zklab/spectral.hpp"
#include "zklab/zk.hpp"

using namespace zkl;
constexpr double kPi = std::numbers::pi;

namespace {

double sech2(double x) {
  const double c = std::cosh(x);
  return 1.0 / (c * c);
}

}  // namespace

TEST_CASE("coefficients") {
  const auto c = zk_coeffs(1.0, 0.0);
  CHECK(c.advect == 1.0);
  CHECK(c.disp_long == 0.5);
  CHECK(c.disp_perp == doctest::Approx(1.0));
  const auto d = zk_coeffs(2.0, 0.0);
  CHECK(d.disp_perp == doctest::Approx(0.625));
  const auto e = zk_coeffs(1.0, 3.0);
  CHECK(e.c == doctest::Approx(2.0));
  CHECK(e.advect == doctest::Approx(2.0));
  CHECK(e.disp_long == doctest::Approx(0.25));
  CHECK(e.disp_perp == doctest::Approx(4.25));
  CHECK_THROWS_AS(zk_coeffs(0.0, 0.0), Error);
  CHECK_THROWS_AS(zk_coeffs(1.0, -0.1), Error);
}

TEST_CASE("linear phase advance") {
  auto g = Grid::make(2, {32, 32}, {2 * kPi, 2 * kPi});
  const auto co = zk_coeffs(1.3, 0.4);
  const int kx = 3, ky = 2;
  const double w = kx * (co.disp_long * kx * kx + co.disp_perp * ky * ky);
  CHECK(zk_symbol(co, kx, ky * ky) == doctest::Approx(w));
  const auto n0 = ScalarField::sample(g, [&](double x, double y, double) { return std::cos(kx * x + ky * y); });
  ZKIntegrator zi(n0, co, 0.0, false);
  for (int i = 0; i < 10; ++i) zi.step(0.037);
  const double T = zi.time();
  const auto expect = ScalarField::sample(g, [&](double x, double y, double) { return std::cos(kx * x + ky * y + w * T); });
  CHECK(max_abs(zi.state().n1 - expect) < 1e-13);
}

TEST_CASE("KdV soliton travels at its speed") {
  const auto co = zk_coeffs(1.0, 0.0);  // advect 1, disp_long 1/2
  const double v = 0.8;
  const double amp = 3 * v / co.advect, width = 0.5 * std::sqrt(v / co.disp_long);
  auto g = Grid::make(1, {512}, {60.0});
  auto exact = [&](double T) {
    return ScalarField::sample(g, [&](double x, double, double) {
      double s = x - v * T;
      s -= 60.0 * std::round(s / 60.0);
      return amp * sech2(width * s);
    });
  };
  // The profile is a steady state of the right-hand side up to translation.
  const ScalarField n0 = exact(0.0);
  CHECK(max_abs(zk_rhs(n0, co) + v * derivative(n0, 0)) < 1e-8);

  const auto traj = zk_solve(n0, co, 5.0, 0.005);
  CHECK(max_abs(traj.states.back().n1 - exact(5.0)) < 1e-6);
}

TEST_CASE("Hamiltonian: gradient and conservation oracles") {
  auto g = Grid::make(2, {64, 64}, {20.0, 20.0});
  std::mt19937_64 rng(3);
  const ScalarField n = random_smooth_field(g, rng, 1.5, 0.7);
  for (const auto& co : {zk_coeffs(1.0, 0.0), zk_coeffs(0.7, 0.5)}) {
    const ScalarField grad = invariant_H_gradient(n, co);
    // Directional derivative by central differences.
    const ScalarField dir = random_smooth_field(g, rng, 1.5, 1.0);
    const double h = 1e-5;
    const double fd = (invariant_H(n + h * dir, co) - invariant_H(n - h * dir, co)) / (2 * h);
    CHECK(fd == doctest::Approx(inner(grad, dir)).epsilon(1e-7));
    // dH/dT = <dH/dn, rhs> vanishes; dM/dT = <n, rhs> vanishes.
    const ScalarField r = zk_rhs(n, co);
    const double scale = l2_norm(grad) * l2_norm(r);
    CHECK(std::abs(inner(grad, r)) < 1e-12 * scale);
    CHECK(std::abs(inner(n, r)) < 1e-12 * l2_norm(n) * l2_norm(r));
    CHECK(std::abs(integral(r)) < 1e-12 * l2_norm(r));
  }
}

TEST_CASE("invariants along a 2D run") {
  auto g = Grid::make(2, {64, 64}, {40.0, 40.0});
  const auto co = zk_coeffs(1.0, 0.0);
  // Band-limited to the dealiased range so the semi-discrete invariants are exact.
  const auto n0 = dealias(ScalarField::sample(g, [](double x, double y, double) { return 0.5 * std::exp(-(x * x + y * y) / 4); }));
  const auto traj = zk_solve(n0, co, 1.0, 0.01);
  const auto& first = traj.log.front();
  const auto& last = traj.log.back();
  CHECK(last.T == doctest::Approx(1.0));
  CHECK(std::abs(last.mean - first.mean) <= 1e-13 * std::max(1.0, std::abs(first.mean)));
  CHECK(std::abs(last.M - first.M) <= 1e-10 * first.M);
  CHECK(std::abs(last.H - first.H) <= 1e-8 * std::abs(first.H));
}

TEST_CASE("CFL guard and determinism") {
  auto g = Grid::make(1, {64}, {10.0});
  const auto co = zk_coeffs(1.0, 0.0);
  const auto n0 = ScalarField::sample(g, [](double x, double, double) { return std::exp(-x * x); });
  ZKIntegrator zi(n0, co);
  CHECK_THROWS_AS(zi.step(10 * zk_cfl_limit(n0, co)), Error);
  const auto a = zk_solve(n0, co, 0.5, 0.01).states.back().n1;
  const auto b = zk_solve(n0, co, 0.5, 0.01).states.back().n1;
  CHECK(std::equal(a.values().begin(), a.values().end(), b.values().begin()));
}

TEST_CASE("continuity in alpha") {
  auto g = Grid::make(2, {64, 64}, {30.0, 30.0});
  const auto n0 = ScalarField::sample(g, [](double x, double y, double) { return 0.5 * std::exp(-(x * x + y * y) / 4); });
  const auto base = zk_solve(n0, zk_coeffs(1.0, 0.0), 1.0, 0.01).states.back().n1;
  const double d1 = l2_norm(zk_solve(n0, zk_coeffs(1.0, 0.1), 1.0, 0.01).states.back().n1 - base);
  const double d2 = l2_norm(zk_solve(n0, zk_coeffs(1.0, 0.01), 1.0, 0.01).states.back().n1 - base);
  CHECK(std::log10(d1 / d2) >= 0.8);
}
