#include "zklab/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace zkl {

Spectrum spectrum(const ScalarField& f) { return f.grid().forward(f.values()); }

ScalarField from_spectrum(const GridPtr& grid, const Spectrum& s) {
  return ScalarField(grid, grid->inverse(s));
}

ScalarField derivative(const ScalarField& f, int axis) {
  if (axis < 0 || axis >= f.grid().dim()) {
    throw Error(ErrorKind::InvalidArgument, "derivative axis out of range");
  }
  std::array<int, 3> orders{0, 0, 0};
  orders[axis] = 1;
  return partial(f, orders);
}

ScalarField partial(const ScalarField& f, std::array<int, 3> orders) {
  const Grid& g = f.grid();
  for (int j = g.dim(); j < 3; ++j) {
    if (orders[j] > 0) return ScalarField(f.grid_ptr());
  }
  int total = 0;
  for (int j = 0; j < 3; ++j) {
    if (orders[j] < 0) throw Error(ErrorKind::InvalidArgument, "negative derivative order");
    total += orders[j];
  }
  if (total == 0) return f;

  Spectrum s = spectrum(f);
  // i^total * prod k_j^{o_j}
  static constexpr Complex kIPow[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
  const Complex phase = kIPow[total % 4];
  for (std::size_t i = 0; i < s.size(); ++i) {
    double mult = 1.0;
    for (int j = 0; j < g.dim(); ++j) {
      if (orders[j] == 0) continue;
      if ((orders[j] % 2 == 1) && g.nyquist(j)[i]) {
        mult = 0.0;
        break;
      }
      mult *= std::pow(g.k(j)[i], orders[j]);
    }
    s[i] *= phase * mult;
  }
  return from_spectrum(f.grid_ptr(), s);
}

ScalarField laplacian(const ScalarField& f) {
  const auto k2 = f.grid().k_squared();
  return apply_multiplier(f, [&](std::size_t i) { return Complex(-k2[i], 0.0); });
}

ScalarField laplacian_perp(const ScalarField& f) {
  const Grid& g = f.grid();
  const auto k2 = g.k_squared();
  const auto kx = g.k(0);
  return apply_multiplier(f, [&](std::size_t i) { return Complex(-(k2[i] - kx[i] * kx[i]), 0.0); });
}

void dealias_in_place(const Grid& grid, Spectrum& s) {
  const auto keep = grid.dealias_mask();
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (!keep[i]) s[i] = 0.0;
  }
}

ScalarField dealias(const ScalarField& f) {
  Spectrum s = spectrum(f);
  dealias_in_place(f.grid(), s);
  return from_spectrum(f.grid_ptr(), s);
}

ScalarField shift(const ScalarField& f, int axis, double distance) {
  const Grid& g = f.grid();
  if (axis < 0 || axis >= g.dim()) throw Error(ErrorKind::InvalidArgument, "shift axis out of range");
  const auto k = g.k(axis);
  const auto nyq = g.nyquist(axis);
  Spectrum s = spectrum(f);
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (nyq[i]) {
      // A real Nyquist mode can only be translated by its real part.
      s[i] *= std::cos(k[i] * distance);
    } else {
      s[i] *= std::polar(1.0, -k[i] * distance);
    }
  }
  return from_spectrum(f.grid_ptr(), s);
}

ScalarField integrate_x(const ScalarField& f, double* dropped) {
  const Grid& g = f.grid();
  const auto kx = g.k(0);
  const auto nyq = g.nyquist(0);
  const auto w = g.hermitian_weight();
  Spectrum s = spectrum(f);
  double lost = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (kx[i] == 0.0) {
      lost += w[i] * std::norm(s[i]);
      s[i] = 0.0;
    } else if (nyq[i]) {
      lost += w[i] * std::norm(s[i]);
      s[i] = 0.0;
    } else {
      s[i] /= Complex(0.0, kx[i]);
    }
  }
  if (dropped) *dropped = std::sqrt(lost / g.volume());
  return from_spectrum(f.grid_ptr(), s);
}

double integral(const ScalarField& f) {
  double sum = 0.0;
  for (double v : f.values()) sum += v;
  return sum * f.grid().cell_volume();
}

double mean(const ScalarField& f) { return integral(f) / f.grid().volume(); }

double inner(const ScalarField& f, const ScalarField& g) {
  f.check_same(g);
  double sum = 0.0;
  const auto a = f.values();
  const auto b = g.values();
  for (std::size_t i = 0; i < a.size(); ++i) sum += a[i] * b[i];
  return sum * f.grid().cell_volume();
}

double l2_norm(const ScalarField& f) { return std::sqrt(inner(f, f)); }

double max_abs(const ScalarField& f) {
  double m = 0.0;
  for (double v : f.values()) m = std::max(m, std::abs(v));
  return m;
}

double min_value(const ScalarField& f) {
  double m = std::numeric_limits<double>::infinity();
  for (double v : f.values()) m = std::min(m, v);
  return m;
}

double max_value(const ScalarField& f) {
  double m = -std::numeric_limits<double>::infinity();
  for (double v : f.values()) m = std::max(m, v);
  return m;
}

namespace {

// (1/V) sum_k w_k (1+|k|^2)^s (1 + c*|k'|^2) |f_k|^2, where |k'|^2 omits
// the Nyquist component of each axis (matching `derivative`).
double weighted_sum(const ScalarField& f, double s, double c) {
  if (!f.all_finite()) throw Error(ErrorKind::InvalidArgument, "non-finite field in norm");
  const Grid& g = f.grid();
  const Spectrum sp = spectrum(f);
  const auto k2 = g.k_squared();
  const auto w = g.hermitian_weight();
  double sum = 0.0;
  for (std::size_t i = 0; i < sp.size(); ++i) {
    double factor = w[i];
    if (s != 0.0) factor *= std::pow(1.0 + k2[i], s);
    if (c != 0.0) {
      double kd = 0.0;
      for (int j = 0; j < g.dim(); ++j) {
        if (!g.nyquist(j)[i]) kd += g.k(j)[i] * g.k(j)[i];
      }
      factor *= 1.0 + c * kd;
    }
    sum += factor * std::norm(sp[i]);
  }
  return sum / g.volume();
}

}  // namespace

double sobolev_norm(const ScalarField& f, double s) {
  if (s < 0.0) throw Error(ErrorKind::InvalidArgument, "Sobolev index must be >= 0");
  return std::sqrt(weighted_sum(f, s, 0.0));
}

double hs_eps_norm(const ScalarField& f, double s, double eps, double weight) {
  if (weight < 0.0 || eps * weight < 0.0) {
    throw Error(ErrorKind::InvalidArgument, "hs_eps_norm needs eps*weight >= 0");
  }
  if (s < 0.0) throw Error(ErrorKind::InvalidArgument, "Sobolev index must be >= 0");
  return std::sqrt(weighted_sum(f, s, eps * weight));
}

double l2_norm(const VectorField& v) {
  double sum = 0.0;
  for (const auto& c : v) sum += inner(c, c);
  return std::sqrt(sum);
}

double sobolev_norm(const VectorField& v, double s) {
  double sum = 0.0;
  for (const auto& c : v) {
    const double n = sobolev_norm(c, s);
    sum += n * n;
  }
  return std::sqrt(sum);
}

double hs_eps_norm(const VectorField& v, double s, double eps, double weight) {
  double sum = 0.0;
  for (const auto& c : v) {
    const double n = hs_eps_norm(c, s, eps, weight);
    sum += n * n;
  }
  return std::sqrt(sum);
}

double outer_shell_max(const ScalarField& f) {
  const Grid& g = f.grid();
  const int d = g.dim();
  std::array<int, 3> n{1, 1, 1};
  for (int j = 0; j < d; ++j) n[j] = g.points()[j];
  double m = 0.0;
  std::size_t s = 0;
  auto in_shell = [](int i, int nj) {
    const int band = std::max(1, nj / 20);  // 5% on each side = 10% of the box
    return i < band || i >= nj - band;
  };
  for (int i = 0; i < n[0]; ++i) {
    for (int j = 0; j < n[1]; ++j) {
      for (int k = 0; k < n[2]; ++k, ++s) {
        const bool shell = in_shell(i, n[0]) || (d > 1 && in_shell(j, n[1])) || (d > 2 && in_shell(k, n[2]));
        if (shell) m = std::max(m, std::abs(f[s]));
      }
    }
  }
  return m;
}

ScalarField random_smooth_field(const GridPtr& grid, std::mt19937_64& rng, double kcut, double amplitude) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Spectrum s(grid->spectral_size(), 0.0);
  const auto k2 = grid->k_squared();
  const auto keep = grid->dealias_mask();
  for (std::size_t i = 0; i < s.size(); ++i) {
    // Draw for every entry so the stream does not depend on kcut.
    const double re = normal(rng);
    const double im = normal(rng);
    if (i == 0 || !keep[i] || k2[i] > kcut * kcut) continue;
    s[i] = Complex(re, im);
  }
  ScalarField f = dealias(from_spectrum(grid, s));
  f += -mean(f);
  const double m = max_abs(f);
  if (m > 0.0) f *= amplitude / m;
  return f;
}

}  // namespace zkl
