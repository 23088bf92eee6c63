#pragma once

#include <array>
#include <cstdint>
#include <random>

#include "zklab/field.hpp"
#include "zklab/grid.hpp"

namespace zkl {

Spectrum spectrum(const ScalarField& f);
ScalarField from_spectrum(const GridPtr& grid, const Spectrum& s);

/// Multiplies every spectral entry s by symbol(s) and transforms back.
template <class Symbol>
ScalarField apply_multiplier(const ScalarField& f, Symbol&& symbol) {
  Spectrum s = spectrum(f);
  for (std::size_t i = 0; i < s.size(); ++i) s[i] *= symbol(i);
  return from_spectrum(f.grid_ptr(), s);
}

/// First derivative along an existing axis. The Nyquist mode of that axis
/// is dropped (its odd derivative is not a real field).
ScalarField derivative(const ScalarField& f, int axis);

/// Mixed partial derivative with per-axis orders (x, y, z). Orders on axes
/// the grid does not have give the zero field. An axis with odd order drops
/// its Nyquist mode.
ScalarField partial(const ScalarField& f, std::array<int, 3> orders);

ScalarField laplacian(const ScalarField& f);
/// Laplacian in the directions transverse to axis 0.
ScalarField laplacian_perp(const ScalarField& f);

/// 2/3 rule: zero every entry with some |m_j| > N_j / 3.
ScalarField dealias(const ScalarField& f);
void dealias_in_place(const Grid& grid, Spectrum& s);

/// Exact periodic translation g(x) = f(x - distance) along an axis.
ScalarField shift(const ScalarField& f, int axis, double distance);

/// Antiderivative along axis 0 for the modes with k_x != 0. The norm of the
/// k_x = 0 part of f, which has no periodic antiderivative, goes to
/// `dropped` when requested.
ScalarField integrate_x(const ScalarField& f, double* dropped = nullptr);

double integral(const ScalarField& f);
double mean(const ScalarField& f);
double inner(const ScalarField& f, const ScalarField& g);
double l2_norm(const ScalarField& f);
double max_abs(const ScalarField& f);
double min_value(const ScalarField& f);
double max_value(const ScalarField& f);

/// sqrt( (1/V) sum_k (1+|k|^2)^s |f_k|^2 ); s = 0 is the quadrature L2 norm.
double sobolev_norm(const ScalarField& f, double s);

/// sqrt(|f|_{H^s}^2 + eps*weight*|grad f|_{H^s}^2). Throws InvalidArgument
/// when eps*weight < 0.
double hs_eps_norm(const ScalarField& f, double s, double eps, double weight = 1.0);

double l2_norm(const VectorField& v);
double sobolev_norm(const VectorField& v, double s);
double hs_eps_norm(const VectorField& v, double s, double eps, double weight = 1.0);

/// Largest |f| over the outer 10% of the box along any axis; used to watch
/// for data reaching the periodic boundary.
double outer_shell_max(const ScalarField& f);

/// Random real field whose spectrum is supported on |k| <= kcut, with zero
/// mean, rescaled so that max|f| = amplitude.
ScalarField random_smooth_field(const GridPtr& grid, std::mt19937_64& rng, double kcut, double amplitude);

}  // namespace zkl
