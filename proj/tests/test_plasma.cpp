#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "zklab/dispersion.hpp"
#include "zklab/plasma.hpp"
#include "zklab/spectral.hpp"

using namespace zkl;
constexpr double kPi = std::numbers::pi;

namespace {

PlasmaState bump(const GridPtr& g, const PlasmaParams& p, double amp = 0.5) {
  auto s = rest_state(g);
  s.n = dealias(ScalarField::sample(g, [amp](double x, double y, double) { return amp * std::exp(-(x * x + y * y) / 4); }));
  s.v[0] = s.n;
  s.v[1] = 0.3 * derivative(s.n, 1);
  s.v[2] = -0.2 * derivative(s.n, 0);
  enforce_poisson(s, p);
  return s;
}

bool identical(const ScalarField& a, const ScalarField& b) {
  return std::equal(a.values().begin(), a.values().end(), b.values().begin());
}

}  // namespace

TEST_CASE("parameter validation") {
  PlasmaParams p;
  CHECK_NOTHROW(p.validate(2));
  p.alpha = 0.5;
  CHECK_THROWS_AS(p.validate(2), Error);
  p.isothermal = true;
  CHECK_NOTHROW(p.validate(2));
  p.eps = 0.0;
  CHECK_THROWS_AS(p.validate(2), Error);
  p.eps = 0.1;
  p.c0 = 0.0;
  CHECK_THROWS_AS(p.validate(2), Error);
}

TEST_CASE("right-hand side") {
  auto g = Grid::make(2, {32, 32}, {20.0, 20.0});
  PlasmaParams p;
  SUBCASE("rest state") {
    const auto k = rhs(rest_state(g), p);
    CHECK(max_abs(k.dn) == 0.0);
    for (const auto& c : k.dv) CHECK(max_abs(c) == 0.0);
  }
  SUBCASE("v = 0") {
    p.isothermal = true;
    p.alpha = 0.7;
    auto s = rest_state(g);
    s.n = dealias(ScalarField::sample(g, [](double x, double y, double) { return 0.4 * std::exp(-(x * x + y * y) / 6); }));
    enforce_poisson(s, p);
    const auto k = rhs(s, p);
    CHECK(max_abs(k.dn) == 0.0);
    for (int j = 0; j < 2; ++j) {
      ScalarField expect = -1.0 * derivative(s.phi, j);
      const ScalarField dn = derivative(s.n, j);
      for (std::size_t i = 0; i < expect.size(); ++i) expect[i] -= p.alpha * dn[i] / (1 + p.eps * s.n[i]);
      CHECK(max_abs(k.dv[j] - dealias(expect)) < 1e-13);
    }
    CHECK(max_abs(k.dv[2]) == 0.0);
  }
  SUBCASE("rotation term only") {
    auto s = rest_state(g);
    s.v[1] = ScalarField(g, 0.2);
    s.v[2] = ScalarField(g, -0.1);
    const auto k = rhs(s, p);
    const double om = p.a / std::sqrt(p.eps);
    CHECK(max_abs(k.dv[1] - ScalarField(g, om * -0.1)) < 1e-14);
    CHECK(max_abs(k.dv[2] - ScalarField(g, -om * 0.2)) < 1e-14);
  }
}

TEST_CASE("rotation substep") {
  auto g = Grid::make(2, {16, 16}, {10.0, 10.0});
  PlasmaParams p;
  p.eps = 0.25;
  p.a = 1.5;
  const double om = p.a / std::sqrt(p.eps);
  std::mt19937_64 rng(5);
  VectorField v(g);
  for (auto& c : v) c = random_smooth_field(g, rng, 2.0, 1.0);

  const auto full = rotation_substep(v, 2 * kPi / om, p);
  for (int c = 0; c < 3; ++c) CHECK(max_abs(full[c] - v[c]) < 1e-14);

  const auto quarter = rotation_substep(v, 0.5 * kPi / om, p);
  CHECK(max_abs(quarter[0] - v[0]) == 0.0);
  CHECK(max_abs(quarter[1] - v[2]) < 1e-15);
  CHECK(max_abs(quarter[2] + v[1]) < 1e-15);

  const auto any = rotation_substep(v, 0.37, p);
  for (std::size_t i = 0; i < v[0].size(); ++i) {
    const double a = v[1][i] * v[1][i] + v[2][i] * v[2][i];
    const double b = any[1][i] * any[1][i] + any[2][i] * any[2][i];
    CHECK(b == doctest::Approx(a).epsilon(1e-14));
  }

  // One RK4 step of y' = om z, z' = -om y: error O(theta^5).
  auto rk4_error = [&](double dt) {
    const double h = dt * om;
    const double amp = 1 - h * h / 2 + h * h * h * h / 24;
    const double rot = h - h * h * h / 6;
    const auto ex = rotation_substep(v, dt, p);
    double e = 0.0;
    for (std::size_t i = 0; i < v[0].size(); ++i) {
      e = std::max(e, std::abs(amp * v[1][i] + rot * v[2][i] - ex[1][i]));
      e = std::max(e, std::abs(-rot * v[1][i] + amp * v[2][i] - ex[2][i]));
    }
    return e;
  };
  const double e1 = rk4_error(0.02), e2 = rk4_error(0.01);
  CHECK(std::log2(e1 / e2) == doctest::Approx(5.0).epsilon(0.05));

  auto g1 = Grid::make(1, {16}, {10.0});
  VectorField v1(g1);
  v1[0] = ScalarField(g1, 0.3);
  CHECK(max_abs(rotation_substep(v1, 0.3, p)[0] - v1[0]) == 0.0);
}

TEST_CASE("step guards") {
  auto g = Grid::make(2, {32, 32}, {20.0, 20.0});
  PlasmaParams p;
  const auto s = bump(g, p);
  CHECK_THROWS_AS(step(s, 10 * cfl_limit(s, p), p), Error);
  PlasmaParams bad = p;
  bad.alpha = 0.2;
  CHECK_THROWS_AS(step(s, 0.01, bad), Error);

  // A deep density well: inf(1 + eps n) drops below c0/2 and the run is stopped.
  PlasmaParams deep;
  deep.eps = 1.0;
  deep.c0 = 1.9;
  auto w = rest_state(g);
  w.n = dealias(ScalarField::sample(g, [](double x, double y, double) { return -0.2 * std::exp(-(x * x + y * y) / 4); }));
  try {
    step(w, 0.01, deep);
    FAIL("expected a floor violation");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::DensityFloorViolated);
  }
  SimulationConfig cfg;
  cfg.horizon = 0.1;
  cfg.dt = 0.01;
  const auto r = simulate(w, deep, cfg);
  CHECK(r.aborted);
  CHECK(r.abort_kind == ErrorKind::DensityFloorViolated);
  CHECK(r.steps == 0);
  CHECK(r.log.size() == 1);
}

TEST_CASE("temporal order") {
  auto g = Grid::make(2, {32, 32}, {20.0, 20.0});
  PlasmaParams p;
  p.eps = 0.2;
  const auto s0 = bump(g, p);
  auto run = [&](int n) {
    PlasmaState s = s0;
    for (int i = 0; i < n; ++i) s = step(s, 0.4 / n, p);
    return s;
  };
  const auto ref = run(128);
  const double e1 = l2_norm(run(8).v - ref.v), e2 = l2_norm(run(16).v - ref.v);
  CHECK(std::log2(e1 / e2) > 1.8);
}

TEST_CASE("linear waves follow the dispersion relation") {
  // eps = 1 is the unscaled system; a small single mode stays linear.
  auto g = Grid::make(2, {16, 16}, {2 * kPi, 2 * kPi});
  PlasmaParams p;
  p.eps = 1.0;
  p.a = 1.0;
  const double delta = 1e-7;
  const auto mode = ScalarField::sample(g, [](double x, double y, double) { return std::cos(x + y); });
  auto s = rest_state(g);
  s.n = delta * mode;
  enforce_poisson(s, p);

  // From rest, the mode amplitude is A cos(w1 t) + B cos(w2 t) with A + B = 1 and
  // A w1^2 + B w2^2 = K / (1 + K) (the initial acceleration).
  const auto roots = dispersion_roots({1, 1, 0}, p.a);
  const double w1 = std::sqrt(roots.omega_sq[0]), w2 = std::sqrt(roots.omega_sq[1]);
  const double acc = 2.0 / 3.0;
  const double B = (acc - w1 * w1) / (w2 * w2 - w1 * w1), A = 1 - B;
  double worst = 0.0;
  for (int i = 1; i <= 500; ++i) {
    s = step(s, 0.01, p);
    const double amp = inner(s.n, mode) / inner(mode, mode) / delta;
    worst = std::max(worst, std::abs(amp - (A * std::cos(w1 * s.t) + B * std::cos(w2 * s.t))));
  }
  CHECK(worst < 1e-4);
}

TEST_CASE("conservation over a short run") {
  auto g = Grid::make(2, {64, 64}, {40.0, 40.0});
  for (double a : {1.0, 0.0}) {
    PlasmaParams p;
    p.a = a;
    SimulationConfig cfg;
    cfg.horizon = 1.0;
    cfg.dt = 0.025;
    const auto r = simulate(bump(g, p), p, cfg);
    REQUIRE_FALSE(r.aborted);
    CHECK(r.steps == 40);
    const auto& f = r.log.front();
    const auto& l = r.log.back();
    CHECK(l.t == doctest::Approx(1.0));
    CHECK(std::abs(l.H - f.H) <= 1e-8 * std::max(1.0, std::abs(f.H)));
    if (a == 0.0) {
      for (int c = 0; c < 3; ++c) CHECK(std::abs(l.P[c] - f.P[c]) <= 1e-10 * std::max(1.0, std::abs(f.P[c])));
    }
  }
}

TEST_CASE("Hamiltonian at rest and scaling") {
  auto g = Grid::make(2, {32, 32}, {20.0, 20.0});
  PlasmaParams p;
  const auto h = hamiltonian(rest_state(g), p);
  CHECK(h.scaled == 0.0);
  auto s = rest_state(g);
  s.v[0] = ScalarField(g, 0.1);
  const auto hv = hamiltonian(s, p);
  CHECK(hv.scaled == doctest::Approx(0.5 * 0.01 * 400.0));
  CHECK(hv.raw == doctest::Approx(hv.scaled * p.eps));
  p.isothermal = true;
  p.alpha = 0.3;
  CHECK(std::isnan(conservation_record(s, p, 3.0).H));
}

TEST_CASE("isothermal with alpha = 0 matches the cold model bit for bit") {
  auto g = Grid::make(2, {32, 32}, {20.0, 20.0});
  PlasmaParams cold;
  PlasmaParams iso = cold;
  iso.isothermal = true;
  PlasmaState a = bump(g, cold), b = a;
  for (int i = 0; i < 100; ++i) {
    a = step(a, 0.02, cold);
    b = step(b, 0.02, iso);
  }
  CHECK(identical(a.n, b.n));
  for (int c = 0; c < 3; ++c) CHECK(identical(a.v[c], b.v[c]));
  CHECK(identical(a.phi, b.phi));
}

TEST_CASE("determinism and horizon handling") {
  auto g = Grid::make(2, {32, 32}, {20.0, 20.0});
  PlasmaParams p;
  SimulationConfig cfg;
  cfg.horizon = 0.3;
  cfg.dt = 0.07;
  cfg.snapshot_every = 0.1;
  const auto r1 = simulate(bump(g, p), p, cfg);
  const auto r2 = simulate(bump(g, p), p, cfg);
  CHECK(r1.steps == 5);
  CHECK(r1.final_state.t == doctest::Approx(0.3));
  CHECK(identical(r1.final_state.n, r2.final_state.n));
  CHECK(r1.snapshots.size() == r2.snapshots.size());
  CHECK(r1.snapshots.size() >= 3);
  cfg.horizon = 0.0;
  const auto r0 = simulate(bump(g, p), p, cfg);
  CHECK(r0.steps == 0);
  CHECK(r0.log.size() == 1);
}
