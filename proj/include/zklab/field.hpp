#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "zklab/error.hpp"
#include "zklab/grid.hpp"

namespace zkl {

/// Real samples of one quantity on a grid.
class ScalarField {
 public:
  ScalarField() = default;
  explicit ScalarField(GridPtr grid) : grid_(std::move(grid)), values_(grid_->size(), 0.0) {}
  ScalarField(GridPtr grid, std::vector<double> values) : grid_(std::move(grid)), values_(std::move(values)) {
    if (values_.size() != grid_->size()) {
      throw Error(ErrorKind::InvalidArgument, "field size does not match grid");
    }
  }
  ScalarField(GridPtr grid, double constant) : grid_(std::move(grid)), values_(grid_->size(), constant) {}

  /// Samples fn(x, y, z) at every grid point; absent axes pass 0.
  template <class Fn>
  static ScalarField sample(const GridPtr& grid, Fn&& fn) {
    ScalarField f(grid);
    const int d = grid->dim();
    const int n0 = grid->points()[0];
    const int n1 = d > 1 ? grid->points()[1] : 1;
    const int n2 = d > 2 ? grid->points()[2] : 1;
    std::size_t s = 0;
    for (int i = 0; i < n0; ++i) {
      const double x = grid->coordinate(0, i);
      for (int j = 0; j < n1; ++j) {
        const double y = d > 1 ? grid->coordinate(1, j) : 0.0;
        for (int k = 0; k < n2; ++k) {
          const double z = d > 2 ? grid->coordinate(2, k) : 0.0;
          f.values_[s++] = fn(x, y, z);
        }
      }
    }
    return f;
  }

  bool empty() const noexcept { return !grid_; }
  const Grid& grid() const { return *grid_; }
  const GridPtr& grid_ptr() const noexcept { return grid_; }
  std::size_t size() const noexcept { return values_.size(); }
  std::span<double> values() noexcept { return values_; }
  std::span<const double> values() const noexcept { return values_; }
  std::vector<double>& data() noexcept { return values_; }
  const std::vector<double>& data() const noexcept { return values_; }
  double& operator[](std::size_t i) noexcept { return values_[i]; }
  double operator[](std::size_t i) const noexcept { return values_[i]; }

  bool all_finite() const noexcept {
    for (double v : values_) {
      if (!std::isfinite(v)) return false;
    }
    return true;
  }

  template <class Fn>
  ScalarField map(Fn&& fn) const {
    ScalarField out(grid_);
    for (std::size_t i = 0; i < values_.size(); ++i) out.values_[i] = fn(values_[i]);
    return out;
  }

  ScalarField& operator+=(const ScalarField& o) {
    check_same(o);
    for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += o.values_[i];
    return *this;
  }
  ScalarField& operator-=(const ScalarField& o) {
    check_same(o);
    for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= o.values_[i];
    return *this;
  }
  ScalarField& operator*=(const ScalarField& o) {
    check_same(o);
    for (std::size_t i = 0; i < values_.size(); ++i) values_[i] *= o.values_[i];
    return *this;
  }
  ScalarField& operator*=(double s) noexcept {
    for (double& v : values_) v *= s;
    return *this;
  }
  ScalarField& operator+=(double s) noexcept {
    for (double& v : values_) v += s;
    return *this;
  }
  /// this += s * o
  ScalarField& axpy(double s, const ScalarField& o) {
    check_same(o);
    for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += s * o.values_[i];
    return *this;
  }

  void check_same(const ScalarField& o) const {
    if (grid_ != o.grid_ && !(grid_ && o.grid_ && grid_->same_shape(*o.grid_))) {
      throw Error(ErrorKind::InvalidArgument, "fields live on different grids");
    }
  }

 private:
  GridPtr grid_;
  std::vector<double> values_;
};

inline ScalarField operator+(ScalarField a, const ScalarField& b) { return a += b; }
inline ScalarField operator-(ScalarField a, const ScalarField& b) { return a -= b; }
inline ScalarField operator*(ScalarField a, const ScalarField& b) { return a *= b; }
inline ScalarField operator*(double s, ScalarField a) { return a *= s; }
inline ScalarField operator*(ScalarField a, double s) { return a *= s; }
inline ScalarField operator+(ScalarField a, double s) { return a += s; }
inline ScalarField operator-(ScalarField a) { return a *= -1.0; }

/// Velocity-like field. One component in 1D, three (x, y, z) otherwise:
/// in 2D the z component is kept with no z dependence.
class VectorField {
 public:
  VectorField() = default;
  explicit VectorField(const GridPtr& grid) {
    const int n = components_for(grid->dim());
    comps_.reserve(n);
    for (int i = 0; i < n; ++i) comps_.emplace_back(grid);
  }
  explicit VectorField(std::vector<ScalarField> comps) : comps_(std::move(comps)) {
    for (std::size_t i = 1; i < comps_.size(); ++i) comps_[0].check_same(comps_[i]);
  }

  static int components_for(int dim) noexcept { return dim == 1 ? 1 : 3; }

  std::size_t size() const noexcept { return comps_.size(); }
  ScalarField& operator[](std::size_t i) { return comps_.at(i); }
  const ScalarField& operator[](std::size_t i) const { return comps_.at(i); }
  const GridPtr& grid_ptr() const { return comps_.at(0).grid_ptr(); }
  auto begin() noexcept { return comps_.begin(); }
  auto end() noexcept { return comps_.end(); }
  auto begin() const noexcept { return comps_.begin(); }
  auto end() const noexcept { return comps_.end(); }

  VectorField& operator+=(const VectorField& o) {
    for (std::size_t i = 0; i < comps_.size(); ++i) comps_[i] += o.comps_.at(i);
    return *this;
  }
  VectorField& operator-=(const VectorField& o) {
    for (std::size_t i = 0; i < comps_.size(); ++i) comps_[i] -= o.comps_.at(i);
    return *this;
  }
  VectorField& operator*=(double s) {
    for (auto& c : comps_) c *= s;
    return *this;
  }
  VectorField& axpy(double s, const VectorField& o) {
    for (std::size_t i = 0; i < comps_.size(); ++i) comps_[i].axpy(s, o.comps_.at(i));
    return *this;
  }

 private:
  std::vector<ScalarField> comps_;
};

inline VectorField operator-(VectorField a, const VectorField& b) { return a -= b; }
inline VectorField operator+(VectorField a, const VectorField& b) { return a += b; }

}  // namespace zkl
