#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <vector>

namespace zkl {

using Complex = std::complex<double>;

/// Half-complex spectrum of a real field (the last axis is truncated to
/// N/2+1 modes). Coefficients approximate the continuous Fourier integral:
/// the k=0 entry equals mean * volume.
using Spectrum = std::vector<Complex>;

class Grid;
using GridPtr = std::shared_ptr<const Grid>;

/// Periodic tensor-product grid on the box prod_j [-L_j/2, L_j/2).
///
/// Samples are stored row-major with axis 0 (the x, or magnetic-field,
/// direction) slowest. Physical axes beyond `dim()` are treated as absent:
/// fields are constant along them and every wavenumber table reads zero.
class Grid {
 public:
  static constexpr int kMaxDim = 3;

  /// Throws Error(InvalidArgument) unless dim is 1..3, each count is a power
  /// of two >= 8 and each length is positive and finite.
  static GridPtr make(int dim, std::vector<int> points, std::vector<double> lengths);

  Grid(int dim, std::vector<int> points, std::vector<double> lengths);
  ~Grid();
  Grid(const Grid&) = delete;
  Grid& operator=(const Grid&) = delete;

  int dim() const noexcept { return dim_; }
  int points(int axis) const;
  double length(int axis) const;
  double spacing(int axis) const;
  const std::vector<int>& points() const noexcept { return points_; }
  const std::vector<double>& lengths() const noexcept { return lengths_; }

  std::size_t size() const noexcept { return size_; }
  std::size_t spectral_size() const noexcept { return spectral_size_; }
  double volume() const noexcept { return volume_; }
  double cell_volume() const noexcept { return volume_ / static_cast<double>(size_); }
  double min_spacing() const noexcept;

  /// Coordinate of sample i along axis (origin at the box centre).
  double coordinate(int axis, std::size_t i) const;

  /// Wavenumbers 2*pi*m/L in FFT order (N entries) for one axis.
  std::span<const double> wavenumbers(int axis) const;

  /// Per spectral entry tables. `k(axis)` is zero for absent axes.
  std::span<const double> k(int axis) const;
  std::span<const double> k_squared() const noexcept { return k2_; }
  /// Multiplicity of a half-complex entry in the full spectrum (1 or 2).
  std::span<const double> hermitian_weight() const noexcept { return weight_; }
  /// 1 where the entry is the Nyquist mode of `axis`.
  std::span<const std::uint8_t> nyquist(int axis) const;
  /// 1 where the entry survives the 2/3 rule on every axis.
  std::span<const std::uint8_t> dealias_mask() const noexcept { return keep_; }
  /// Mode index m of every entry along an axis.
  std::span<const int> mode_index(int axis) const;

  Spectrum forward(std::span<const double> values) const;
  std::vector<double> inverse(const Spectrum& spectrum) const;
  void forward(std::span<const double> values, Spectrum& out) const;
  void inverse(const Spectrum& spectrum, std::vector<double>& out) const;

  bool same_shape(const Grid& other) const noexcept;

 private:
  struct Plans;

  int dim_;
  std::vector<int> points_;
  std::vector<double> lengths_;
  std::size_t size_ = 0;
  std::size_t spectral_size_ = 0;
  double volume_ = 1.0;
  std::vector<std::vector<double>> axis_wavenumbers_;
  std::vector<std::vector<double>> k_;
  std::vector<std::vector<int>> m_;
  std::vector<std::vector<std::uint8_t>> nyq_;
  std::vector<double> k2_;
  std::vector<double> weight_;
  std::vector<std::uint8_t> keep_;
  std::unique_ptr<Plans> plans_;
};

/// Number of threads FFTW uses for plans created after the call.
/// Results are bit-reproducible for a fixed value.
void set_fft_threads(int threads);

}  // namespace zkl
