#pragma once
/// Uniformly sampled fields on the periodic unit square: node (i, j) sits at
/// (i/n, j/n), i indexing x and j indexing y, row-major with j fastest.
/// On the torus every node carries equal quadrature weight 1/n^2, so the
/// trapezoid rule is plain averaging.

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "qss/numerics.hpp"

namespace qss {

struct ScalarGrid {
  int n = 0;
  std::vector<double> a;

  static ScalarGrid zeros(int n) {
    if (n < 2) throw std::invalid_argument("ScalarGrid: n must be >= 2");
    ScalarGrid g;
    g.n = n;
    g.a.assign(static_cast<std::size_t>(n) * n, 0.0);
    return g;
  }

  double dx() const { return 1.0 / n; }
  Vec2 node(int i, int j) const { return {i * dx(), j * dx()}; }

  double& at(int i, int j) { return a[static_cast<std::size_t>(i) * n + j]; }
  double at(int i, int j) const {
    return a[static_cast<std::size_t>(i) * n + j];
  }
  /// Access with periodic wrapping of either index.
  double atw(int i, int j) const {
    i %= n;
    j %= n;
    if (i < 0) i += n;
    if (j < 0) j += n;
    return at(i, j);
  }

  double integral() const {
    double acc = 0.0;
    for (double v : a) acc += v;
    return acc * dx() * dx();
  }
  double sup_abs() const {
    double m = 0.0;
    for (double v : a) m = std::max(m, std::abs(v));
    return m;
  }
  double l2norm() const {
    double acc = 0.0;
    for (double v : a) acc += v * v;
    return std::sqrt(acc) * dx();
  }
};

struct VectorGrid {
  int n = 0;
  std::vector<Vec2> a;

  static VectorGrid zeros(int n) {
    if (n < 2) throw std::invalid_argument("VectorGrid: n must be >= 2");
    VectorGrid g;
    g.n = n;
    g.a.assign(static_cast<std::size_t>(n) * n, Vec2{});
    return g;
  }

  double dx() const { return 1.0 / n; }
  Vec2 node(int i, int j) const { return {i * dx(), j * dx()}; }

  Vec2& at(int i, int j) { return a[static_cast<std::size_t>(i) * n + j]; }
  Vec2 at(int i, int j) const {
    return a[static_cast<std::size_t>(i) * n + j];
  }
  Vec2 atw(int i, int j) const {
    i %= n;
    j %= n;
    if (i < 0) i += n;
    if (j < 0) j += n;
    return at(i, j);
  }

  double sup_abs() const {
    double m = 0.0;
    for (Vec2 v : a) m = std::max(m, v.norm());
    return m;
  }
};

/// Centred second-order gradient with periodic wrapping.
inline Vec2 grid_gradient(const ScalarGrid& g, int i, int j) {
  const double inv = 1.0 / (2.0 * g.dx());
  return {(g.atw(i + 1, j) - g.atw(i - 1, j)) * inv,
          (g.atw(i, j + 1) - g.atw(i, j - 1)) * inv};
}

/// Centred second-order divergence with periodic wrapping.
inline double grid_divergence(const VectorGrid& v, int i, int j) {
  const double inv = 1.0 / (2.0 * v.dx());
  return (v.atw(i + 1, j).x - v.atw(i - 1, j).x) * inv +
         (v.atw(i, j + 1).y - v.atw(i, j - 1).y) * inv;
}

}  // namespace qss
