#pragma once
/// Core numerical utilities shared across the library: plane vectors and
/// 2x2 matrices, high-order finite differences on uniform grids (periodic and
/// bounded), quadrature rules, Hoelder seminorms on sampled data, power-law
/// slope fits, and a deterministic random number generator.

#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <vector>

namespace qss {

// ---------------------------------------------------------------------------
// Plane vectors and 2x2 matrices
// ---------------------------------------------------------------------------

struct Vec2 {
  double x = 0.0, y = 0.0;

  Vec2() = default;
  Vec2(double x_, double y_) : x(x_), y(y_) {}

  Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
  Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
  Vec2 operator*(double c) const { return {c * x, c * y}; }
  Vec2 operator/(double c) const { return {x / c, y / c}; }
  Vec2& operator+=(Vec2 o) { x += o.x; y += o.y; return *this; }
  Vec2& operator-=(Vec2 o) { x -= o.x; y -= o.y; return *this; }
  double norm() const { return std::hypot(x, y); }
  double norm_sq() const { return x * x + y * y; }
};

inline Vec2 operator*(double c, Vec2 v) { return v * c; }
inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
/// Left rotation by 90 degrees: J(a,b) = (-b, a).
inline Vec2 rot90(Vec2 v) { return {-v.y, v.x}; }

/// 2x2 matrix with columns (a,c) and (b,d):  [a b; c d].
struct Mat2 {
  double a = 0.0, b = 0.0, c = 0.0, d = 0.0;

  static Mat2 from_columns(Vec2 col0, Vec2 col1) {
    return {col0.x, col1.x, col0.y, col1.y};
  }
  double det() const { return a * d - b * c; }
  Mat2 inverse() const {
    const double dd = det();
    return {d / dd, -b / dd, -c / dd, a / dd};
  }
  Vec2 apply(Vec2 v) const { return {a * v.x + b * v.y, c * v.x + d * v.y}; }
  Mat2 operator-(const Mat2& o) const { return {a - o.a, b - o.b, c - o.c, d - o.d}; }
  Mat2 operator+(const Mat2& o) const { return {a + o.a, b + o.b, c + o.c, d + o.d}; }
  double frobenius() const { return std::sqrt(a * a + b * b + c * c + d * d); }
  /// Spectral operator norm (largest singular value), closed form.
  double opnorm() const {
    const double f2 = a * a + b * b + c * c + d * d;
    const double dt = det();
    const double disc = std::max(0.0, f2 * f2 - 4.0 * dt * dt);
    return std::sqrt(0.5 * (f2 + std::sqrt(disc)));
  }
  Vec2 row(int i) const { return i == 0 ? Vec2{a, b} : Vec2{c, d}; }
  Vec2 col(int j) const { return j == 0 ? Vec2{a, c} : Vec2{b, d}; }
};

// ---------------------------------------------------------------------------
// Finite differences (Fornberg weights) on uniform grids
// ---------------------------------------------------------------------------

/// Weights w_j such that f^(m)(x0) ~= sum_j w_j f(nodes[j]) for arbitrary
/// distinct nodes; classic recursive algorithm, exact for polynomials of
/// degree < nodes.size().
std::vector<double> fd_weights(double x0, std::span<const double> nodes, int order);

/// High-order differentiation of uniformly sampled data. Periodic grids wrap
/// a centred 13-point stencil; bounded grids shift the window near the ends.
/// Orders 1..6 are supported with formal accuracy >= 7.
class FiniteDiff {
 public:
  /// n samples, spacing dx. For periodic data the samples cover one period
  /// (f[n] == f[0] implicitly, not stored).
  FiniteDiff(int n, double dx, bool periodic);

  std::vector<double> derivative(std::span<const double> f, int order) const;
  void derivative(std::span<const double> f, int order, std::span<double> out) const;

  int size() const { return n_; }
  double spacing() const { return dx_; }
  bool periodic() const { return periodic_; }
  static constexpr int kStencil = 13;

 private:
  int n_;
  double dx_;
  bool periodic_;
  // weights[order-1][window][j]: for periodic grids a single centred window;
  // for bounded grids kStencil windows (one per left-offset).
  std::vector<std::vector<std::vector<double>>> weights_;
};

// ---------------------------------------------------------------------------
// Quadrature
// ---------------------------------------------------------------------------

/// Trapezoid rule on a uniform grid. For periodic data the samples are the n
/// distinct nodes of a period and every node carries equal weight dx.
double trapezoid(std::span<const double> f, double dx, bool periodic);

/// Composite Simpson on a uniform grid with an odd number of nodes.
double simpson(std::span<const double> f, double dx);

/// Cumulative integral with Simpson pairs + trapezoid fallback; out[0] = 0.
std::vector<double> cumulative_integral(std::span<const double> f, double dx);

/// Gauss-Legendre nodes/weights on [-1, 1], computed by Newton iteration on
/// the Legendre recurrence (deterministic, machine accurate).
struct GaussRule {
  std::vector<double> nodes, weights;
};
GaussRule gauss_legendre(int n);

// ---------------------------------------------------------------------------
// Fits and seminorms
// ---------------------------------------------------------------------------

/// Least-squares slope of y against x.
double ls_slope(std::span<const double> x, std::span<const double> y);

/// Least-squares slope of log(values) against log(abscissae); the usual
/// convergence/scaling-rate estimator. All values must be positive.
double loglog_slope(std::span<const double> abscissae, std::span<const double> values);

/// Discrete Hoelder seminorm sup |f(p) - f(q)| / |p - q|^alpha of a scalar
/// field sampled on a uniform nx x ny grid with spacings (dx, dy); offsets are
/// scanned dyadically along axes and diagonals. Periodic wraps both axes.
double holder_seminorm_2d(std::span<const double> f, int nx, int ny, double dx,
                          double dy, double alpha, bool periodic);

/// Same for a 2-component field (Euclidean norm of the value difference),
/// components as two consecutive planes of nx*ny values.
double holder_seminorm_2d_vec(std::span<const double> fx, std::span<const double> fy,
                              int nx, int ny, double dx, double dy, double alpha,
                              bool periodic);

/// Discrete Hoelder seminorm of 1-D samples (uniform spacing).
double holder_seminorm_1d(std::span<const double> f, double dx, double alpha,
                          bool periodic);

// ---------------------------------------------------------------------------
// Interpolation
// ---------------------------------------------------------------------------

/// Barycentric Lagrange interpolation through (xs, fs); xs distinct.
double lagrange_interpolate(std::span<const double> xs, std::span<const double> fs,
                            double x);

/// 8-point Lagrange interpolation of uniformly sampled data (wrap-around for
/// periodic data, clamped windows at the ends otherwise). x in grid units
/// (node j at x = j).
double interp8(std::span<const double> f, double x, bool periodic);

// ---------------------------------------------------------------------------
// Deterministic RNG
// ---------------------------------------------------------------------------

/// 64-bit SplitMix/xorshift-based generator with an explicit bits-to-double
/// mapping, so streams are reproducible across platforms and standard library
/// versions (std distributions are not portable).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed ? seed : 0x9e3779b97f4a7c15ULL) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }
  /// Uniform in [0, 1): top 53 bits scaled by 2^-53.
  double uniform() { return double(next_u64() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  int uniform_int(int n) { return int(next_u64() % std::uint64_t(n)); }

 private:
  std::uint64_t state_;
};

// ---------------------------------------------------------------------------
// Misc
// ---------------------------------------------------------------------------

/// Positive modulus.
inline double wrap(double x, double period) {
  double r = std::fmod(x, period);
  return r < 0 ? r + period : r;
}

inline int wrap_index(int i, int n) {
  int r = i % n;
  return r < 0 ? r + n : r;
}

}  // namespace qss
