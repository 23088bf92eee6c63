#include "zklab/grid.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numbers>
#include <string>

#include "zklab/error.hpp"

namespace zkl {
namespace {

// The FFTW planner is not thread-safe; execution with the new-array
// interface is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

int& fft_thread_count() {
  static int n = 1;
  return n;
}

bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

}  // namespace

void set_fft_threads(int threads) {
  std::lock_guard lock(planner_mutex());
  static bool initialised = false;
  if (!initialised) {
    fftw_init_threads();
    initialised = true;
  }
  fft_thread_count() = std::max(1, threads);
  fftw_plan_with_nthreads(fft_thread_count());
}

struct Grid::Plans {
  fftw_plan r2c = nullptr;
  fftw_plan c2r = nullptr;
  ~Plans() {
    std::lock_guard lock(planner_mutex());
    if (r2c) fftw_destroy_plan(r2c);
    if (c2r) fftw_destroy_plan(c2r);
  }
};

GridPtr Grid::make(int dim, std::vector<int> points, std::vector<double> lengths) {
  return std::make_shared<const Grid>(dim, std::move(points), std::move(lengths));
}

Grid::Grid(int dim, std::vector<int> points, std::vector<double> lengths)
    : dim_(dim), points_(std::move(points)), lengths_(std::move(lengths)) {
  if (dim_ < 1 || dim_ > kMaxDim) {
    throw Error(ErrorKind::InvalidArgument, "grid dimension must be 1, 2 or 3");
  }
  if (static_cast<int>(points_.size()) != dim_ || static_cast<int>(lengths_.size()) != dim_) {
    throw Error(ErrorKind::InvalidArgument, "need one point count and one length per axis");
  }
  for (int j = 0; j < dim_; ++j) {
    if (!is_power_of_two(points_[j]) || points_[j] < 8) {
      throw Error(ErrorKind::InvalidArgument,
                  "point count " + std::to_string(points_[j]) + " is not a power of two >= 8");
    }
    if (!(lengths_[j] > 0.0) || !std::isfinite(lengths_[j])) {
      throw Error(ErrorKind::InvalidArgument, "box lengths must be positive and finite");
    }
  }

  size_ = 1;
  volume_ = 1.0;
  std::vector<int> spec_shape(points_);
  spec_shape.back() = points_.back() / 2 + 1;
  spectral_size_ = 1;
  for (int j = 0; j < dim_; ++j) {
    size_ *= static_cast<std::size_t>(points_[j]);
    spectral_size_ *= static_cast<std::size_t>(spec_shape[j]);
    volume_ *= lengths_[j];
  }

  axis_wavenumbers_.assign(kMaxDim, {});
  for (int j = 0; j < dim_; ++j) {
    const int n = points_[j];
    auto& table = axis_wavenumbers_[j];
    table.resize(n);
    for (int i = 0; i < n; ++i) {
      const int m = i < n / 2 ? i : i - n;
      table[i] = 2.0 * std::numbers::pi * m / lengths_[j];
    }
  }

  k_.assign(kMaxDim, std::vector<double>(spectral_size_, 0.0));
  m_.assign(kMaxDim, std::vector<int>(spectral_size_, 0));
  nyq_.assign(kMaxDim, std::vector<std::uint8_t>(spectral_size_, 0));
  k2_.assign(spectral_size_, 0.0);
  weight_.assign(spectral_size_, 1.0);
  keep_.assign(spectral_size_, 1);

  std::vector<int> idx(dim_, 0);
  for (std::size_t s = 0; s < spectral_size_; ++s) {
    double k2 = 0.0;
    bool keep = true;
    for (int j = 0; j < dim_; ++j) {
      const int n = points_[j];
      const bool half_axis = (j == dim_ - 1);
      const int i = idx[j];
      const int m = half_axis ? i : (i < n / 2 ? i : i - n);
      const double kj = 2.0 * std::numbers::pi * m / lengths_[j];
      m_[j][s] = m;
      k_[j][s] = kj;
      nyq_[j][s] = (std::abs(m) == n / 2) ? 1 : 0;
      k2 += kj * kj;
      if (3 * std::abs(m) > n) keep = false;
      if (half_axis) weight_[s] = (m == 0 || m == n / 2) ? 1.0 : 2.0;
    }
    k2_[s] = k2;
    keep_[s] = keep ? 1 : 0;
    for (int j = dim_ - 1; j >= 0; --j) {
      if (++idx[j] < spec_shape[j]) break;
      idx[j] = 0;
    }
  }

  plans_ = std::make_unique<Plans>();
  std::vector<double> rbuf(size_);
  Spectrum cbuf(spectral_size_);
  auto* cptr = reinterpret_cast<fftw_complex*>(cbuf.data());
  const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  std::lock_guard lock(planner_mutex());
  plans_->r2c = fftw_plan_dft_r2c(dim_, points_.data(), rbuf.data(), cptr, flags);
  plans_->c2r = fftw_plan_dft_c2r(dim_, points_.data(), cptr, rbuf.data(), flags);
  if (!plans_->r2c || !plans_->c2r) {
    throw Error(ErrorKind::InvalidArgument, "FFTW could not plan this grid");
  }
}

Grid::~Grid() = default;

int Grid::points(int axis) const {
  if (axis < 0 || axis >= dim_) throw Error(ErrorKind::InvalidArgument, "axis out of range");
  return points_[axis];
}

double Grid::length(int axis) const {
  if (axis < 0 || axis >= dim_) throw Error(ErrorKind::InvalidArgument, "axis out of range");
  return lengths_[axis];
}

double Grid::spacing(int axis) const { return length(axis) / points(axis); }

double Grid::min_spacing() const noexcept {
  double h = lengths_[0] / points_[0];
  for (int j = 1; j < dim_; ++j) h = std::min(h, lengths_[j] / points_[j]);
  return h;
}

double Grid::coordinate(int axis, std::size_t i) const {
  return -0.5 * length(axis) + static_cast<double>(i) * spacing(axis);
}

std::span<const double> Grid::wavenumbers(int axis) const {
  if (axis < 0 || axis >= dim_) throw Error(ErrorKind::InvalidArgument, "axis out of range");
  return axis_wavenumbers_[axis];
}

std::span<const double> Grid::k(int axis) const {
  if (axis < 0 || axis >= kMaxDim) throw Error(ErrorKind::InvalidArgument, "axis out of range");
  return k_[axis];
}

std::span<const std::uint8_t> Grid::nyquist(int axis) const {
  if (axis < 0 || axis >= kMaxDim) throw Error(ErrorKind::InvalidArgument, "axis out of range");
  return nyq_[axis];
}

std::span<const int> Grid::mode_index(int axis) const {
  if (axis < 0 || axis >= kMaxDim) throw Error(ErrorKind::InvalidArgument, "axis out of range");
  return m_[axis];
}

void Grid::forward(std::span<const double> values, Spectrum& out) const {
  if (values.size() != size_) throw Error(ErrorKind::InvalidArgument, "field size does not match grid");
  out.resize(spectral_size_);
  // Out-of-place r2c leaves its input untouched.
  fftw_execute_dft_r2c(plans_->r2c, const_cast<double*>(values.data()),
                       reinterpret_cast<fftw_complex*>(out.data()));
  const double scale = cell_volume();
  for (auto& c : out) c *= scale;
}

Spectrum Grid::forward(std::span<const double> values) const {
  Spectrum out;
  forward(values, out);
  return out;
}

void Grid::inverse(const Spectrum& spectrum, std::vector<double>& out) const {
  if (spectrum.size() != spectral_size_) {
    throw Error(ErrorKind::InvalidArgument, "spectrum size does not match grid");
  }
  // c2r overwrites its input.
  Spectrum scratch(spectrum);
  out.resize(size_);
  fftw_execute_dft_c2r(plans_->c2r, reinterpret_cast<fftw_complex*>(scratch.data()), out.data());
  const double scale = 1.0 / volume_;
  for (auto& v : out) v *= scale;
}

std::vector<double> Grid::inverse(const Spectrum& spectrum) const {
  std::vector<double> out;
  inverse(spectrum, out);
  return out;
}

bool Grid::same_shape(const Grid& other) const noexcept {
  return dim_ == other.dim_ && points_ == other.points_ && lengths_ == other.lengths_;
}

}  // namespace zkl
