#include "qss/numerics.hpp"

#include <algorithm>
#include <cassert>
#include <numeric>

namespace qss {

std::vector<double> fd_weights(double x0, std::span<const double> nodes, int order) {
  // Fornberg's recursion: builds weights for derivatives 0..order at x0.
  const int n = int(nodes.size());
  if (order >= n) throw std::invalid_argument("fd_weights: order >= node count");
  std::vector<std::vector<double>> c(n, std::vector<double>(order + 1, 0.0));
  double c1 = 1.0;
  double c4 = nodes[0] - x0;
  c[0][0] = 1.0;
  for (int i = 1; i < n; ++i) {
    const int mn = std::min(i, order);
    double c2 = 1.0;
    const double c5 = c4;
    c4 = nodes[i] - x0;
    for (int j = 0; j < i; ++j) {
      const double c3 = nodes[i] - nodes[j];
      c2 *= c3;
      if (j == i - 1) {
        for (int k = mn; k >= 1; --k)
          c[i][k] = c1 * (k * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
        c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
      }
      for (int k = mn; k >= 1; --k)
        c[j][k] = (c4 * c[j][k] - k * c[j][k - 1]) / c3;
      c[j][0] = c4 * c[j][0] / c3;
    }
    c1 = c2;
  }
  std::vector<double> w(n);
  for (int i = 0; i < n; ++i) w[i] = c[i][order];
  return w;
}

FiniteDiff::FiniteDiff(int n, double dx, bool periodic)
    : n_(n), dx_(dx), periodic_(periodic) {
  if (n < kStencil)
    throw std::invalid_argument("FiniteDiff: need at least 13 samples");
  constexpr int maxOrder = 6;
  weights_.resize(maxOrder);
  // Unit-spacing node offsets; scale by dx^-order at evaluation time.
  if (periodic_) {
    std::vector<double> nodes(kStencil);
    for (int j = 0; j < kStencil; ++j) nodes[j] = double(j - kStencil / 2);
    for (int m = 1; m <= maxOrder; ++m)
      weights_[m - 1].push_back(fd_weights(0.0, nodes, m));
  } else {
    // Window with left offset L covers nodes [i-L, i-L+12]; interior uses L=6.
    for (int m = 1; m <= maxOrder; ++m) {
      weights_[m - 1].resize(kStencil);
      for (int L = 0; L < kStencil; ++L) {
        std::vector<double> nodes(kStencil);
        for (int j = 0; j < kStencil; ++j) nodes[j] = double(j - L);
        weights_[m - 1][L] = fd_weights(0.0, nodes, m);
      }
    }
  }
}

void FiniteDiff::derivative(std::span<const double> f, int order,
                            std::span<double> out) const {
  if (int(f.size()) != n_ || int(out.size()) != n_)
    throw std::invalid_argument("FiniteDiff::derivative: size mismatch");
  if (order < 1 || order > 6)
    throw std::invalid_argument("FiniteDiff::derivative: order must be 1..6");
  const double scale = std::pow(dx_, -order);
  const int half = kStencil / 2;
  if (periodic_) {
    const auto& w = weights_[order - 1][0];
    for (int i = 0; i < n_; ++i) {
      double acc = 0.0;
      for (int j = 0; j < kStencil; ++j)
        acc += w[j] * f[wrap_index(i - half + j, n_)];
      out[i] = acc * scale;
    }
  } else {
    for (int i = 0; i < n_; ++i) {
      // Left offset: centred in the interior, shifted near the ends.
      int L = half;
      if (i < half) L = i;
      else if (i > n_ - 1 - half) L = kStencil - (n_ - i);
      const auto& w = weights_[order - 1][L];
      const int base = i - L;
      double acc = 0.0;
      for (int j = 0; j < kStencil; ++j) acc += w[j] * f[base + j];
      out[i] = acc * scale;
    }
  }
}

std::vector<double> FiniteDiff::derivative(std::span<const double> f, int order) const {
  std::vector<double> out(n_);
  derivative(f, order, out);
  return out;
}

double trapezoid(std::span<const double> f, double dx, bool periodic) {
  if (f.empty()) return 0.0;
  double s = 0.0;
  if (periodic) {
    for (double v : f) s += v;
    return s * dx;
  }
  s = 0.5 * (f.front() + f.back());
  for (size_t i = 1; i + 1 < f.size(); ++i) s += f[i];
  return s * dx;
}

double simpson(std::span<const double> f, double dx) {
  const int n = int(f.size());
  if (n < 3 || n % 2 == 0)
    throw std::invalid_argument("simpson: need an odd number of nodes >= 3");
  double s = f[0] + f[n - 1];
  for (int i = 1; i < n - 1; i += 2) s += 4.0 * f[i];
  for (int i = 2; i < n - 1; i += 2) s += 2.0 * f[i];
  return s * dx / 3.0;
}

std::vector<double> cumulative_integral(std::span<const double> f, double dx) {
  const int n = int(f.size());
  std::vector<double> out(n, 0.0);
  if (n < 2) return out;
  // March in Simpson pairs (4th order); the odd node between uses the
  // three-point Newton-Cotes half-panel formula, also 4th order.
  for (int i = 0; i + 2 < n; i += 2) {
    out[i + 1] = out[i] + dx * (5.0 * f[i] + 8.0 * f[i + 1] - f[i + 2]) / 12.0;
    out[i + 2] = out[i] + dx * (f[i] + 4.0 * f[i + 1] + f[i + 2]) / 3.0;
  }
  if (n % 2 == 0)  // trailing interval
    out[n - 1] = out[n - 2] + dx * 0.5 * (f[n - 2] + f[n - 1]);
  return out;
}

GaussRule gauss_legendre(int n) {
  GaussRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  const double pi = std::acos(-1.0);
  for (int i = 0; i < n; ++i) {
    // Chebyshev-like initial guess for the i-th root of P_n.
    double x = std::cos(pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      // Legendre recurrence for P_n(x) and P'_n(x).
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    rule.nodes[i] = x;
    rule.weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
  std::reverse(rule.nodes.begin(), rule.nodes.end());
  std::reverse(rule.weights.begin(), rule.weights.end());
  return rule;
}

double ls_slope(std::span<const double> x, std::span<const double> y) {
  const int n = int(x.size());
  if (n < 2 || int(y.size()) != n)
    throw std::invalid_argument("ls_slope: need >= 2 matching samples");
  double xm = 0.0, ym = 0.0;
  for (int i = 0; i < n; ++i) { xm += x[i]; ym += y[i]; }
  xm /= n;
  ym /= n;
  double num = 0.0, den = 0.0;
  for (int i = 0; i < n; ++i) {
    num += (x[i] - xm) * (y[i] - ym);
    den += (x[i] - xm) * (x[i] - xm);
  }
  return num / den;
}

double loglog_slope(std::span<const double> abscissae, std::span<const double> values) {
  std::vector<double> lx(abscissae.size()), ly(values.size());
  for (size_t i = 0; i < abscissae.size(); ++i) {
    if (abscissae[i] <= 0.0 || values[i] <= 0.0)
      throw std::invalid_argument("loglog_slope: data must be positive");
    lx[i] = std::log(abscissae[i]);
    ly[i] = std::log(values[i]);
  }
  return ls_slope(lx, ly);
}

namespace {

template <class Diff>
double holder_scan(int nx, int ny, double dx, double dy, double alpha,
                   bool periodic, Diff diff) {
  // Dyadic offsets along axes and diagonals; enough to certify the seminorm
  // of smooth-plus-rough fields without an O(N^2) pair scan.
  const std::array<std::pair<int, int>, 4> dirs{{{1, 0}, {0, 1}, {1, 1}, {1, -1}}};
  double best = 0.0;
  for (auto [ux, uy] : dirs) {
    const int maxlen = periodic ? std::max(nx, ny) / 2 : std::max(nx, ny) - 1;
    for (int len = 1; len <= maxlen; len *= 2) {
      const int ox = ux * len, oy = uy * len;
      if (!periodic && (std::abs(ox) >= nx || std::abs(oy) >= ny)) break;
      const double dist = std::hypot(ox * dx, oy * dy);
      const double scale = std::pow(dist, -alpha);
      for (int j = 0; j < ny; ++j) {
        int j2 = j + oy;
        if (periodic) j2 = wrap_index(j2, ny);
        else if (j2 < 0 || j2 >= ny) continue;
        for (int i = 0; i < nx; ++i) {
          int i2 = i + ox;
          if (periodic) i2 = wrap_index(i2, nx);
          else if (i2 >= nx) continue;
          const double d = diff(i, j, i2, j2) * scale;
          if (d > best) best = d;
        }
      }
    }
  }
  return best;
}

}  // namespace

double holder_seminorm_2d(std::span<const double> f, int nx, int ny, double dx,
                          double dy, double alpha, bool periodic) {
  if (int(f.size()) != nx * ny)
    throw std::invalid_argument("holder_seminorm_2d: size mismatch");
  return holder_scan(nx, ny, dx, dy, alpha, periodic,
                     [&](int i, int j, int i2, int j2) {
                       return std::abs(f[j * nx + i] - f[j2 * nx + i2]);
                     });
}

double holder_seminorm_2d_vec(std::span<const double> fx, std::span<const double> fy,
                              int nx, int ny, double dx, double dy, double alpha,
                              bool periodic) {
  if (int(fx.size()) != nx * ny || int(fy.size()) != nx * ny)
    throw std::invalid_argument("holder_seminorm_2d_vec: size mismatch");
  return holder_scan(nx, ny, dx, dy, alpha, periodic,
                     [&](int i, int j, int i2, int j2) {
                       const double ax = fx[j * nx + i] - fx[j2 * nx + i2];
                       const double ay = fy[j * nx + i] - fy[j2 * nx + i2];
                       return std::hypot(ax, ay);
                     });
}

double holder_seminorm_1d(std::span<const double> f, double dx, double alpha,
                          bool periodic) {
  const int n = int(f.size());
  double best = 0.0;
  const int maxlen = periodic ? n / 2 : n - 1;
  for (int len = 1; len <= maxlen; len *= 2) {
    const double scale = std::pow(len * dx, -alpha);
    for (int i = 0; i < n; ++i) {
      int i2 = i + len;
      if (periodic) i2 = wrap_index(i2, n);
      else if (i2 >= n) break;
      best = std::max(best, std::abs(f[i] - f[i2]) * scale);
    }
  }
  return best;
}

double lagrange_interpolate(std::span<const double> xs, std::span<const double> fs,
                            double x) {
  const int n = int(xs.size());
  // Barycentric form, weights computed on the fly (n is small).
  std::vector<double> w(n, 1.0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (j != i) w[i] /= (xs[i] - xs[j]);
  double num = 0.0, den = 0.0;
  for (int i = 0; i < n; ++i) {
    const double d = x - xs[i];
    if (std::abs(d) < 1e-14) return fs[i];
    const double t = w[i] / d;
    num += t * fs[i];
    den += t;
  }
  return num / den;
}

double interp8(std::span<const double> f, double x, bool periodic) {
  const int n = int(f.size());
  const int k = int(std::floor(x));
  int base = k - 3;  // 8 nodes: base .. base+7
  if (!periodic) base = std::clamp(base, 0, n - 8);
  std::array<double, 8> xs, fs;
  for (int j = 0; j < 8; ++j) {
    const int idx = periodic ? wrap_index(base + j, n) : base + j;
    xs[j] = double(base + j);
    fs[j] = f[idx];
  }
  return lagrange_interpolate(xs, fs, x);
}

}  // namespace qss
