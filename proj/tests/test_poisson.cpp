#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "zklab/poisson.hpp"
#include "zklab/spectral.hpp"

using namespace zkl;
constexpr double kPi = std::numbers::pi;

namespace {

GridPtr box(int n = 64, double L = 20.0) { return Grid::make(2, {n, n}, {L, L}); }

}  // namespace

TEST_CASE("trivial solves") {
  auto g = box();
  SUBCASE("zero density") {
    const auto r = solve_unscaled(ScalarField(g));
    CHECK(max_abs(r.phi) == 0.0);
    CHECK(r.diag.residual == 0.0);
    const auto m = monotone_solve(ScalarField(g));
    CHECK(max_abs(m.phi) == 0.0);
  }
  SUBCASE("constant density") {
    for (double c : {-0.7, -0.3, 0.2, 0.9, 3.0}) {
      const auto r = solve_unscaled(ScalarField(g, c));
      CHECK(max_abs(r.phi + (-std::log1p(c))) < 1e-12);
      for (double eps : {1.0, 0.2, 0.05}) {
        const auto s = solve_scaled(ScalarField(g, c), eps);
        CHECK(max_abs(s.phi + (-std::log1p(eps * c) / eps)) < 1e-12);
      }
    }
  }
  SUBCASE("monotone, constant 0.3") {
    const auto m = monotone_solve(ScalarField(g, 0.3));
    CHECK(max_abs(m.phi + (-std::log(1.3))) < 1e-11);
  }
  SUBCASE("density floor") {
    CHECK_THROWS_AS(solve_unscaled(ScalarField(g, -1.0)), Error);
    try {
      solve_scaled(ScalarField(g, -30.0), 0.1);
      FAIL("expected a floor violation");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::DensityFloorViolated);
    }
  }
}

TEST_CASE("pointwise bounds, energy inequality, cross-solver agreement") {
  auto g = box(64);
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 6; ++trial) {
    const ScalarField n = random_smooth_field(g, rng, 2.0, 0.5);
    SolverConfig cfg;
    const auto r = solve_unscaled(n, cfg);
    CHECK(r.diag.residual <= cfg.tol);
    REQUIRE(r.diag.bounds_apply);
    CHECK(r.diag.bound_lo == doctest::Approx(std::log(0.5)));
    CHECK(min_value(r.phi) >= r.diag.bound_lo - 1e-10);
    CHECK(max_value(r.phi) <= r.diag.bound_hi + 1e-10);
    CHECK(r.diag.energy_lhs <= 0.5 * r.diag.I1 + 1e-8);

    const auto m = monotone_solve(n, cfg);
    CHECK(l2_norm(m.phi - r.phi) < 1e-9);

    // Uniqueness: a distant warm start lands on the same solution.
    SolverConfig warm = cfg;
    warm.warm_start = ScalarField(g, 0.3);
    CHECK(l2_norm(solve_unscaled(n, warm).phi - r.phi) < 10 * cfg.tol);

    // |e^phi - 1| <= ((e^|phi|_inf - 1)/|phi|_inf) |phi|
    const double pinf = max_abs(r.phi);
    const double lhs = l2_norm(r.phi.map([](double v) { return std::expm1(v); }));
    CHECK(lhs <= std::expm1(pinf) / pinf * l2_norm(r.phi) * (1 + 1e-12));
  }
}

TEST_CASE("degenerate input skips the bounds but still solves") {
  auto g = box(32);
  const auto n = ScalarField::sample(g, [](double x, double y, double) { return 1.5 * std::exp(-(x * x + y * y) / 4); });
  const auto r = solve_unscaled(n);
  CHECK_FALSE(r.diag.bounds_apply);
  CHECK(r.diag.residual <= 1e-11);
  CHECK_THROWS_AS(monotone_solve(n), Error);
}

TEST_CASE("quasineutral limit") {
  auto g = box(64, 40.0);
  const auto n = ScalarField::sample(g, [](double x, double y, double) { return 0.5 * std::exp(-(x * x + y * y) / 4); });
  std::vector<double> errs;
  for (double eps : {0.2, 0.1, 0.05}) errs.push_back(l2_norm(solve_scaled(n, eps).phi - n));
  CHECK(errs[1] < errs[0]);
  CHECK(errs[2] < errs[1]);
  const double order = std::log(errs[0] / errs[2]) / std::log(4.0);
  CHECK(order == doctest::Approx(1.0).epsilon(0.15));
}

TEST_CASE("linearized operator") {
  auto g = box(64, 2 * kPi);
  SUBCASE("Fourier eigenfunction") {
    const auto u = ScalarField::sample(g, [](double x, double, double) { return std::cos(x); });
    CHECK(max_abs(apply_M(ScalarField(g), u, 1.0) - 2.0 * u) < 1e-12);
  }
  SUBCASE("eps to zero") {
    std::mt19937_64 rng(8);
    const ScalarField phi = random_smooth_field(g, rng, 4.0, 1.0);
    const ScalarField u = random_smooth_field(g, rng, 4.0, 1.0);
    CHECK(l2_norm(apply_M(phi, u, 1e-9) - u) < 1e-6 * l2_norm(u));
  }
  SUBCASE("self-adjoint and coercive") {
    std::mt19937_64 rng(12);
    for (int trial = 0; trial < 5; ++trial) {
      const ScalarField phi = random_smooth_field(g, rng, 5.0, 2.0);
      const ScalarField u = random_smooth_field(g, rng, 5.0, 1.0);
      const ScalarField w = random_smooth_field(g, rng, 5.0, 1.0);
      for (double eps : {1.0, 0.1}) {
        const double a = inner(apply_M(phi, u, eps), w), b = inner(u, apply_M(phi, w, eps));
        CHECK(std::abs(a - b) <= 1e-12 * std::abs(a) + 1e-14);
        double grad = 0.0;
        for (int j = 0; j < 2; ++j) grad += std::pow(l2_norm(derivative(u, j)), 2);
        const double lower = std::exp(-eps * max_abs(phi)) * inner(u, u) + eps * grad;
        CHECK(inner(u, apply_M(phi, u, eps)) >= lower * (1 - 1e-12));
      }
    }
  }
  SUBCASE("diagonal inverse at phi = 0") {
    const double eps = 0.3;
    const auto v = ScalarField::sample(g, [](double x, double y, double) { return std::sin(2 * x) + std::cos(3 * y); });
    const auto expect = ScalarField::sample(g, [eps](double x, double y, double) {
      return std::sin(2 * x) / (4 * eps + 1) + std::cos(3 * y) / (9 * eps + 1);
    });
    CHECK(max_abs(invert_M(ScalarField(g), v, eps) - expect) < 1e-11);
  }
  SUBCASE("round trip") {
    std::mt19937_64 rng(21);
    for (double eps : {1.0, 0.1, 0.01}) {
      const ScalarField phi = random_smooth_field(g, rng, 5.0, 1.5);
      const ScalarField u0 = random_smooth_field(g, rng, 5.0, 1.0);
      const ScalarField u = invert_M(phi, apply_M(phi, u0, eps), eps);
      CHECK(l2_norm(u - u0) < 1e-9);
    }
  }
}
