#pragma once
/// Uniform cell-centered fields on the periodic unit square.
///
/// A GridField stores one (scalar) or two (planar vector) components at the
/// centers ((i+1/2)/R, (j+1/2)/R) of an R x R grid, component-major. The
/// representation tag distinguishes physical-space values from spectral
/// coefficients packed by the transform code; all constructors start
/// physical. Level-n tile assembly requires R divisible by 2*5^n so each
/// tile owns an integer sub-grid.

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

#include "qss/numerics.hpp"

namespace qss {

enum class Representation { physical, spectral };

class GridField {
 public:
  static GridField scalar(int resolution) { return GridField(resolution, 1); }
  static GridField vector2(int resolution) { return GridField(resolution, 2); }

  int resolution() const { return n_; }
  int components() const { return comps_; }
  double dx() const { return 1.0 / n_; }
  Representation representation() const { return rep_; }
  void set_representation(Representation r) { rep_ = r; }

  /// Centre of cell (i, j); i indexes x, j indexes y.
  Vec2 cell_centre(int i, int j) const {
    return {(i + 0.5) / n_, (j + 0.5) / n_};
  }

  double& at(int c, int i, int j) { return a_[(std::size_t(c) * n_ + i) * n_ + j]; }
  double at(int c, int i, int j) const {
    return a_[(std::size_t(c) * n_ + i) * n_ + j];
  }

  std::span<double> component(int c) {
    return {a_.data() + std::size_t(c) * n_ * n_, std::size_t(n_) * n_};
  }
  std::span<const double> component(int c) const {
    return {a_.data() + std::size_t(c) * n_ * n_, std::size_t(n_) * n_};
  }
  std::vector<double>& values() { return a_; }
  const std::vector<double>& values() const { return a_; }

  /// True when each tile of a side x side tiling owns an integer sub-grid.
  bool tile_compatible(int side) const { return side > 0 && n_ % side == 0; }

  /// Midpoint-rule integral of one component.
  double integral(int c = 0) const {
    double s = 0.0;
    for (double v : component(c)) s += v;
    return s * dx() * dx();
  }

  /// L2 norm over all components (for vectors, the L2 norm of |v|).
  double l2norm() const {
    double s = 0.0;
    for (double v : a_) s += v * v;
    return std::sqrt(s) * dx();
  }

  /// Largest absolute entry over all components.
  double sup_abs() const {
    double s = 0.0;
    for (double v : a_) s = std::max(s, std::abs(v));
    return s;
  }

 private:
  GridField(int resolution, int comps) : n_(resolution), comps_(comps) {
    if (resolution < 2)
      throw std::invalid_argument("GridField: resolution must be at least 2");
    a_.assign(std::size_t(comps_) * n_ * n_, 0.0);
  }

  int n_, comps_;
  Representation rep_ = Representation::physical;
  std::vector<double> a_;
};

}  // namespace qss
