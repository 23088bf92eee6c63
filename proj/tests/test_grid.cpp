#include <cmath>
#include <cstdio>
#include <filesystem>
#include <numbers>
#include <random>

#include "doctest.h"
#include "zklab/field_io.hpp"
#include "zklab/spectral.hpp"

using namespace zkl;
constexpr double kPi = std::numbers::pi;

namespace {

GridPtr torus2(int n = 16) { return Grid::make(2, {n, n}, {2 * kPi, 2 * kPi}); }

double rel_diff(const ScalarField& a, const ScalarField& b) { return l2_norm(a - b) / l2_norm(b); }

}  // namespace

TEST_CASE("grid construction") {
  SUBCASE("1D wavenumber table") {
    auto g = Grid::make(1, {8}, {2 * kPi});
    const double expect[] = {0, 1, 2, 3, -4, -3, -2, -1};
    auto k = g->wavenumbers(0);
    REQUIRE(k.size() == 8);
    for (int i = 0; i < 8; ++i) CHECK(k[i] == doctest::Approx(expect[i]).epsilon(1e-15));
  }
  SUBCASE("point count") { CHECK(torus2()->size() == 256); }
  SUBCASE("invalid inputs") {
    CHECK_THROWS_AS(Grid::make(1, {12}, {1.0}), Error);
    CHECK_THROWS_AS(Grid::make(1, {4}, {1.0}), Error);
    CHECK_THROWS_AS(Grid::make(2, {16, 16}, {1.0, 0.0}), Error);
    CHECK_THROWS_AS(Grid::make(2, {16, 16}, {1.0, -2.0}), Error);
    CHECK_THROWS_AS(Grid::make(4, {8, 8, 8, 8}, {1, 1, 1, 1}), Error);
  }
  SUBCASE("symmetric spectrum and spacing") {
    auto g = Grid::make(3, {8, 16, 8}, {1.0, 2.0, 3.0});
    CHECK(g->spacing(1) == doctest::Approx(2.0 / 16));
    for (int j = 0; j < 3; ++j) {
      auto k = g->wavenumbers(j);
      const int n = g->points(j);
      for (int i = 1; i < n / 2; ++i) CHECK(k[i] == doctest::Approx(-k[n - i]));
    }
  }
}

TEST_CASE("round trip and Parseval") {
  std::mt19937_64 rng(7);
  for (int dim = 1; dim <= 3; ++dim) {
    std::vector<int> pts(dim, dim == 3 ? 16 : 32);
    std::vector<double> len(dim, 10.0);
    auto g = Grid::make(dim, pts, len);
    const ScalarField f = random_smooth_field(g, rng, 3.0, 1.0);
    const ScalarField back = from_spectrum(g, spectrum(f));
    CHECK(rel_diff(back, f) < 1e-13);
    CHECK(sobolev_norm(f, 0.0) == doctest::Approx(l2_norm(f)).epsilon(1e-13));
  }
}

TEST_CASE("spectral derivative") {
  auto g = Grid::make(1, {32}, {2 * kPi});
  SUBCASE("sin to cos") {
    // coordinates start at -pi, so shift the expectation accordingly
    const auto s = ScalarField::sample(g, [](double x, double, double) { return std::sin(x); });
    const auto c = ScalarField::sample(g, [](double x, double, double) { return std::cos(x); });
    CHECK(max_abs(derivative(s, 0) - c) < 1e-12);
  }
  SUBCASE("constant") { CHECK(max_abs(derivative(ScalarField(g, 3.5), 0)) == 0.0); }
  SUBCASE("axis out of range") { CHECK_THROWS_AS(derivative(ScalarField(g), 1), Error); }
  SUBCASE("Nyquist mode is dropped") {
    auto nyq = ScalarField::sample(g, [](double x, double, double) { return std::cos(16 * x); });
    CHECK(max_abs(derivative(nyq, 0)) < 1e-12);
  }
}

TEST_CASE("derivative agrees with centred differences at second order") {
  // For a smooth periodic f the centred difference error is h^2 f'''/6.
  double prev = 0.0;
  for (int n : {32, 64, 128}) {
    auto g = Grid::make(1, {n}, {2 * kPi});
    const auto f = ScalarField::sample(g, [](double x, double, double) { return std::exp(std::sin(x)); });
    const ScalarField d = derivative(f, 0);
    const double h = g->spacing(0);
    double err = 0.0;
    for (int i = 0; i < n; ++i) {
      const double fd = (f[(i + 1) % n] - f[(i + n - 1) % n]) / (2 * h);
      err = std::max(err, std::abs(fd - d[i]));
    }
    if (prev > 0.0) CHECK(std::log2(prev / err) == doctest::Approx(2.0).epsilon(0.05));
    prev = err;
  }
}

TEST_CASE("product rule within dealiasing error") {
  auto g = torus2(64);
  const auto f = ScalarField::sample(g, [](double x, double y, double) { return std::sin(x) * std::cos(2 * y); });
  const auto h = ScalarField::sample(g, [](double x, double y, double) { return std::cos(3 * x) + std::sin(y); });
  const ScalarField lhs = derivative(f * h, 0);
  const ScalarField rhs = f * derivative(h, 0) + h * derivative(f, 0);
  CHECK(max_abs(lhs - rhs) < 1e-12);
}

TEST_CASE("Sobolev norms") {
  SUBCASE("constant field") {
    auto g = Grid::make(2, {16, 16}, {3.0, 5.0});
    for (double s : {0.0, 1.0, 2.5}) CHECK(sobolev_norm(ScalarField(g, 1.0), s) == doctest::Approx(std::sqrt(15.0)));
  }
  SUBCASE("single shell") {
    auto g = torus2();
    const auto c = ScalarField::sample(g, [](double x, double, double) { return std::cos(x); });
    CHECK(l2_norm(c) == doctest::Approx(std::sqrt(2 * kPi * kPi)));
    CHECK(sobolev_norm(c, 1.0) == doctest::Approx(std::sqrt(2.0) * l2_norm(c)).epsilon(1e-13));
  }
  SUBCASE("naive double-loop oracle, s = 2") {
    // Direct DFT by a double loop, independent of the FFT tables.
    const int n = 16;
    const double L = 2 * kPi;
    auto g = Grid::make(2, {n, n}, {L, L});
    std::mt19937_64 rng(11);
    const ScalarField f = random_smooth_field(g, rng, 4.0, 1.0);
    double sum = 0.0;
    for (int m1 = -n / 2; m1 < n / 2; ++m1) {
      for (int m2 = -n / 2; m2 < n / 2; ++m2) {
        std::complex<double> c = 0.0;
        for (int i = 0; i < n; ++i) {
          for (int j = 0; j < n; ++j) {
            const double x = g->coordinate(0, i), y = g->coordinate(1, j);
            c += f[i * n + j] * std::polar(1.0, -(2 * kPi / L) * (m1 * x + m2 * y));
          }
        }
        c *= g->cell_volume();
        const double k2 = std::pow(2 * kPi / L, 2) * (m1 * m1 + m2 * m2);
        sum += std::pow(1 + k2, 2) * std::norm(c);
      }
    }
    CHECK(sobolev_norm(f, 2.0) == doctest::Approx(std::sqrt(sum / g->volume())).epsilon(1e-12));
  }
  SUBCASE("monotone in s, homogeneous, triangle inequality") {
    auto g = Grid::make(2, {32, 32}, {8.0, 8.0});
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 5; ++trial) {
      const ScalarField f = random_smooth_field(g, rng, 5.0, 1.0);
      const ScalarField h = random_smooth_field(g, rng, 5.0, 2.0);
      double prev = 0.0;
      for (double s : {0.0, 0.5, 1.0, 2.0, 3.0}) {
        const double v = sobolev_norm(f, s);
        CHECK(v >= prev);
        prev = v;
      }
      CHECK(sobolev_norm(-3.0 * f, 1.5) == doctest::Approx(3.0 * sobolev_norm(f, 1.5)).epsilon(1e-14));
      CHECK(sobolev_norm(f + h, 2.0) <= sobolev_norm(f, 2.0) + sobolev_norm(h, 2.0));
    }
  }
  SUBCASE("negative index") { CHECK_THROWS_AS(sobolev_norm(ScalarField(torus2()), -1.0), Error); }
}

TEST_CASE("eps-weighted norm") {
  auto g = Grid::make(2, {32, 32}, {2 * kPi, 2 * kPi});
  SUBCASE("weight zero") {
    std::mt19937_64 rng(5);
    const ScalarField f = random_smooth_field(g, rng, 6.0, 1.0);
    CHECK(hs_eps_norm(f, 2.0, 0.3, 0.0) == sobolev_norm(f, 2.0));
  }
  SUBCASE("cos x") {
    const auto c = ScalarField::sample(g, [](double x, double, double) { return std::cos(x); });
    CHECK(hs_eps_norm(c, 0.0, 1.0, 1.0) == doctest::Approx(std::sqrt(2.0) * l2_norm(c)).epsilon(1e-13));
  }
  SUBCASE("component-wise oracle") {
    std::mt19937_64 rng(9);
    for (int trial = 0; trial < 4; ++trial) {
      const ScalarField f = random_smooth_field(g, rng, 8.0, 1.0);
      const double eps = 0.1 * (trial + 1), s = 0.5 * trial;
      double expect = std::pow(sobolev_norm(f, s), 2);
      for (int j = 0; j < 2; ++j) expect += eps * std::pow(sobolev_norm(derivative(f, j), s), 2);
      const double got = std::pow(hs_eps_norm(f, s, eps, 1.0), 2);
      CHECK(got == doctest::Approx(expect).epsilon(1e-12));
      CHECK(hs_eps_norm(f, s, eps) >= sobolev_norm(f, s));
    }
  }
  SUBCASE("negative weight") { CHECK_THROWS_AS(hs_eps_norm(ScalarField(g), 0.0, 0.1, -1.0), Error); }
}

TEST_CASE("dealiasing") {
  auto g = Grid::make(2, {24 + 8, 32}, {2 * kPi, 2 * kPi});
  SUBCASE("retained modes untouched") {
    const auto f = ScalarField::sample(g, [](double x, double y, double) { return std::cos(3 * x) * std::sin(10 * y); });
    CHECK(max_abs(dealias(f) - f) < 1e-13);
  }
  SUBCASE("Nyquist removed") {
    const auto f = ScalarField::sample(g, [](double x, double, double) { return std::cos(16 * x); });
    CHECK(max_abs(dealias(f)) < 1e-13);
  }
  SUBCASE("idempotent") {
    std::mt19937_64 rng(1);
    ScalarField f(g);
    std::normal_distribution<double> nd;
    for (auto& v : f.values()) v = nd(rng);
    const ScalarField once = dealias(f);
    CHECK(max_abs(dealias(once) - once) < 1e-14);
  }
}

TEST_CASE("shift and antiderivative") {
  auto g = Grid::make(2, {32, 16}, {10.0, 4.0});
  const auto f = ScalarField::sample(g, [](double x, double y, double) {
    return std::exp(std::sin(2 * kPi * x / 10.0)) * std::cos(2 * kPi * y / 4.0);
  });
  const double d = 1.37;
  const auto expect = ScalarField::sample(g, [d](double x, double y, double) {
    return std::exp(std::sin(2 * kPi * (x - d) / 10.0)) * std::cos(2 * kPi * y / 4.0);
  });
  CHECK(max_abs(shift(f, 0, d) - expect) < 1e-12);

  double dropped = -1.0;
  const ScalarField F = integrate_x(derivative(f, 0), &dropped);
  CHECK(dropped < 1e-13);
  CHECK(max_abs(derivative(F, 0) - derivative(f, 0)) < 1e-12);

  // f has a k_x = 0 part; d_X of the antiderivative is f minus its line means.
  double dropped_f = 0.0;
  const ScalarField G = integrate_x(f, &dropped_f);
  ScalarField line_mean(g);
  for (int j = 0; j < 16; ++j) {
    double m = 0.0;
    for (int i = 0; i < 32; ++i) m += f[i * 16 + j];
    for (int i = 0; i < 32; ++i) line_mean[i * 16 + j] = m / 32;
  }
  CHECK(dropped_f == doctest::Approx(l2_norm(line_mean)).epsilon(1e-12));
  CHECK(max_abs(derivative(G, 0) - (f - line_mean)) < 1e-12);
}

TEST_CASE("field dump round trip") {
  auto g = Grid::make(2, {16, 8}, {3.25, 1.0 / 3.0});
  std::mt19937_64 rng(4);
  const ScalarField f = random_smooth_field(g, rng, 5.0, 1.0);
  const auto path = std::filesystem::temp_directory_path() / "zklab_dump_test.zkf";
  write_field(path.string(), f);
  const ScalarField back = read_field(path.string());
  CHECK(back.grid().same_shape(*g));
  CHECK(max_abs(back - f) == 0.0);
  CHECK_THROWS_AS(read_field(path.string(), Grid::make(2, {16, 16}, {3.25, 1.0 / 3.0})), Error);

  // Truncated payload.
  std::filesystem::resize_file(path, std::filesystem::file_size(path) - 8);
  CHECK_THROWS_AS(read_field(path.string()), Error);
  std::filesystem::remove(path);
}
