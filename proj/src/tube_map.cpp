#include "qss/tube_map.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "qss/numerics.hpp"

namespace qss {
namespace {

constexpr double kSeriesSwitch = 1e-8;  ///< |kappa| below which the closed form is 0/0
constexpr double kFocalMarginFloor = 0.25;  ///< discriminant floor: 1 - kappa b >= 1/2
constexpr double kOvershoot = 1.2;  ///< Newton may roam up to kOvershoot * r in y

}  // namespace

// ---------------------------------------------------------------------------
// Normal offset
// ---------------------------------------------------------------------------

double normal_offset(double kappa, double y, double speed) {
  const double w = y / speed;
  if (std::abs(kappa) < kSeriesSwitch) return w * (1.0 + 0.5 * kappa * w);
  const double disc = 1.0 - 2.0 * kappa * w;
  if (disc <= 0.0)
    throw std::invalid_argument(
        "normal_offset: fibre reaches past the focal distance (kappa=" +
        std::to_string(kappa) + ", y=" + std::to_string(y) + ")");
  // Rationalised small-branch root: identical to (1 - sqrt(disc))/kappa but
  // free of the cancellation that costs half the digits as kappa w -> 0.
  return 2.0 * w / (1.0 + std::sqrt(disc));
}

double normal_offset_dy(double kappa, double b, double speed) {
  return 1.0 / (speed * (1.0 - kappa * b));
}

OffsetFixedPoint perturbed_offset_fixed_point(const std::vector<double>& kappa_pert,
                                              const std::vector<double>& kappa_base,
                                              const std::vector<double>& beta_base,
                                              const std::vector<double>& speed_pert,
                                              const std::vector<double>& speed_base,
                                              double y) {
  const std::size_t n = kappa_base.size();
  if (kappa_pert.size() != n || beta_base.size() != n || speed_pert.size() != n ||
      speed_base.size() != n)
    throw std::invalid_argument("perturbed_offset_fixed_point: node array sizes differ");

  OffsetFixedPoint out;
  std::vector<double> delta(n, 0.0), next(n, 0.0);
  constexpr int kMaxSweeps = 100;
  constexpr double kStall = 1e-15;
  for (int sweep = 1; sweep <= kMaxSweeps; ++sweep) {
    double change = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double dk = kappa_pert[i] - kappa_base[i];
      const double dinv = 1.0 / speed_pert[i] - 1.0 / speed_base[i];
      const double b = beta_base[i], d = delta[i];
      const double q = 2.0 * b * d * dk + kappa_base[i] * d * d + dk * d * d;
      next[i] = (0.5 * b * b * dk + y * dinv + 0.5 * q) / (1.0 - kappa_base[i] * b);
      change = std::max(change, std::abs(next[i] - d));
    }
    delta.swap(next);
    out.iterations = sweep;
    if (change < kStall) {
      out.converged = true;
      break;
    }
    out.converged = false;
  }
  out.beta.resize(n);
  for (std::size_t i = 0; i < n; ++i) out.beta[i] = beta_base[i] + delta[i];
  return out;
}

// ---------------------------------------------------------------------------
// Chart evaluation
// ---------------------------------------------------------------------------

Vec2 TubeMap::map(double s, double y) const {
  const bool per = curve_.closed;
  const double u = s / curve_.ds();
  const double k = interp8(kappa_, u, per);
  const double sp = interp8(speed_, u, per);
  const double b = normal_offset(k, y, sp);
  const Vec2 gamma{interp8(px_, u, per), interp8(py_, u, per)};
  const Vec2 eta{interp8(ex_, u, per), interp8(ey_, u, per)};
  return gamma + b * eta;
}

Mat2 TubeMap::jacobian(double s, double y) const {
  const bool per = curve_.closed;
  const double u = s / curve_.ds();
  const double k = interp8(kappa_, u, per);
  const double ks = interp8(kappa_s_, u, per);
  const double sp = interp8(speed_, u, per);
  const double sps = interp8(speed_s_, u, per);
  const Vec2 tau{interp8(tx_, u, per), interp8(ty_, u, per)};
  const Vec2 eta{interp8(ex_, u, per), interp8(ey_, u, per)};
  const double b = normal_offset(k, y, sp);
  const double margin = 1.0 - k * b;
  // Differentiating b - (k/2) b^2 = y / sp along s at fixed y:
  //   b_s (1 - k b) = (k_s / 2) b^2 - y sp_s / sp^2.
  const double b_s = (0.5 * ks * b * b - y * sps / (sp * sp)) / margin;
  const Vec2 col_s = (sp * margin) * tau + b_s * eta;
  const Vec2 col_y = normal_offset_dy(k, b, sp) * eta;
  return Mat2::from_columns(col_s, col_y);
}

double TubeMap::offset(double s, double y) const {
  const bool per = curve_.closed;
  const double u = s / curve_.ds();
  return normal_offset(interp8(kappa_, u, per), y, interp8(speed_, u, per));
}

// ---------------------------------------------------------------------------
// Inversion
// ---------------------------------------------------------------------------

bool TubeMap::newton_from(Vec2 x, ChartPoint seed, ChartPoint& root,
                          bool& pinned_at_end) const {
  const double L = curve_.length;
  const bool per = curve_.closed;
  const double ylim = kOvershoot * r_;
  double s = seed.s, y = seed.y;
  pinned_at_end = false;
  for (int it = 0; it <= kMaxNewtonIterations; ++it) {
    const Vec2 f = map(s, y) - x;
    if (f.norm() < kNewtonTolerance) {
      root = {per ? wrap(s, L) : s, y};
      return true;
    }
    if (it == kMaxNewtonIterations) break;
    const Mat2 jac = jacobian(s, y);
    if (std::abs(jac.det()) < 1e-14) break;
    const Vec2 step = jac.inverse().apply(f);
    s -= step.x;
    y -= step.y;
    s = per ? wrap(s, L) : std::clamp(s, 0.0, L);
    y = std::clamp(y, -ylim, ylim);
  }
  // An open-curve run that ends pressed against an s-endpoint chased a
  // target beyond the end fibre: the root it wants does not exist in the
  // parameter domain. Interior roots un-pin the clamp, so this cannot
  // misfire for points genuinely inside the tube.
  pinned_at_end = !per && (s == 0.0 || s == L);
  return false;
}

std::optional<ChartPoint> TubeMap::root_near(Vec2 x) const {
  if (x.x < bb_lo_.x || x.y < bb_lo_.y || x.x > bb_hi_.x || x.y > bb_hi_.y)
    return std::nullopt;
  const int cx = int((x.x - bb_lo_.x) / cell_);
  const int cy = int((x.y - bb_lo_.y) / cell_);

  // Candidate seeds from the 3x3 cell neighbourhood, nearest first.
  std::vector<std::pair<double, int>> cand;
  for (int dy = -1; dy <= 1; ++dy) {
    for (int dx = -1; dx <= 1; ++dx) {
      const int bx = cx + dx, by = cy + dy;
      if (bx < 0 || by < 0 || bx >= ncx_ || by >= ncy_) continue;
      for (int idx : buckets_[std::size_t(by) * ncx_ + bx]) {
        const Vec2 d = seed_pts_[idx] - x;
        cand.emplace_back(d.x * d.x + d.y * d.y, idx);
      }
    }
  }
  if (cand.empty()) return std::nullopt;
  std::sort(cand.begin(), cand.end());

  ChartPoint root;
  bool past_end = false;
  const int tries = std::min<int>(4, int(cand.size()));
  for (int t = 0; t < tries; ++t) {
    bool pinned = false;
    if (newton_from(x, seed_params_[cand[t].second], root, pinned)) return root;
    past_end = past_end || pinned;
  }
  if (past_end) return std::nullopt;  // beyond an open end cap

  // Every nearby start failed. A point within half a seed cell of a seed is
  // deep inside the Newton basin, so failure there indicates a broken chart;
  // anything farther is just an exterior point beyond the chart overshoot.
  if (std::sqrt(cand.front().first) < 0.5 * std::min(cell_, min_halfwidth_))
    throw std::runtime_error("TubeMap::invert: Newton failed next to the curve at (" +
                             std::to_string(x.x) + ", " + std::to_string(x.y) + ")");
  return std::nullopt;
}

std::optional<ChartPoint> TubeMap::invert(Vec2 x) const {
  const auto root = root_near(x);
  if (!root || std::abs(root->y) >= r_) return std::nullopt;
  return root;
}

std::optional<ChartPoint> TubeMap::invert_extended(Vec2 x) const {
  return root_near(x);
}

// ---------------------------------------------------------------------------
// Construction
// ---------------------------------------------------------------------------

TubeMap build_tube_map(const Curve& curve, const FrenetData& fr, double tube_radius) {
  const int n = curve.size();
  if (n < 16) throw std::invalid_argument("build_tube_map: too few samples");
  if (!(tube_radius > 0.0))
    throw std::invalid_argument("build_tube_map: tube radius must be positive");
  if (int(fr.kappa.size()) != n || int(fr.speed.size()) != n)
    throw std::invalid_argument("build_tube_map: frame data does not match the curve");

  TubeMap m;
  m.curve_ = curve;
  m.fr_ = fr;
  m.r_ = tube_radius;

  m.px_.resize(n), m.py_.resize(n), m.tx_.resize(n), m.ty_.resize(n);
  m.ex_.resize(n), m.ey_.resize(n);
  for (int i = 0; i < n; ++i) {
    m.px_[i] = curve.pts[i].x, m.py_[i] = curve.pts[i].y;
    m.tx_[i] = fr.tau[i].x, m.ty_[i] = fr.tau[i].y;
    m.ex_[i] = fr.eta[i].x, m.ey_[i] = fr.eta[i].y;
  }
  m.kappa_ = fr.kappa;
  m.kappa_s_ = fr.kappa_s;
  m.speed_ = fr.speed;
  const FiniteDiff fd(n, curve.ds(), curve.closed);
  m.speed_s_ = fd.derivative(fr.speed, 1);

  // Focal margin: keep 1 - kappa b >= 1/2 on the whole strip, i.e. the
  // discriminant at y = +-r at least 1/4 on every node.
  m.min_halfwidth_ = std::numeric_limits<double>::infinity();
  for (int i = 0; i < n; ++i) {
    for (const double y : {tube_radius, -tube_radius}) {
      const double disc = 1.0 - 2.0 * fr.kappa[i] * y / fr.speed[i];
      if (disc < kFocalMarginFloor)
        throw std::invalid_argument(
            "build_tube_map: tube half-width " + std::to_string(tube_radius) +
            " leaves the focal margin at node " + std::to_string(i) +
            " (discriminant " + std::to_string(disc) + " < 0.25)");
      m.min_halfwidth_ = std::min(
          m.min_halfwidth_, std::abs(normal_offset(fr.kappa[i], y, fr.speed[i])));
    }
  }

  // Seed grid for Newton: 256 fibres x 64 offsets, hashed into uniform cells
  // sized by the largest spacing between grid neighbours.
  const int ns = 256, ny = 64;
  const double L = curve.length;
  m.seed_pts_.reserve(std::size_t(ns) * ny);
  m.seed_params_.reserve(std::size_t(ns) * ny);
  for (int i = 0; i < ns; ++i) {
    const double s = curve.closed ? L * i / ns : L * i / (ns - 1);
    for (int j = 0; j < ny; ++j) {
      const double y = -tube_radius + (j + 0.5) * 2.0 * tube_radius / ny;
      m.seed_params_.push_back({s, y});
      m.seed_pts_.push_back(m.map(s, y));
    }
  }
  Vec2 lo{std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
  Vec2 hi = -1.0 * lo;
  double spacing = 0.0;
  for (int i = 0; i < ns; ++i) {
    for (int j = 0; j < ny; ++j) {
      const Vec2 p = m.seed_pts_[std::size_t(i) * ny + j];
      lo.x = std::min(lo.x, p.x), lo.y = std::min(lo.y, p.y);
      hi.x = std::max(hi.x, p.x), hi.y = std::max(hi.y, p.y);
      if (j + 1 < ny)
        spacing = std::max(spacing, (m.seed_pts_[std::size_t(i) * ny + j + 1] - p).norm());
      const int inext = i + 1 < ns ? i + 1 : (curve.closed ? 0 : -1);
      if (inext >= 0)
        spacing = std::max(spacing, (m.seed_pts_[std::size_t(inext) * ny + j] - p).norm());
    }
  }
  m.cell_ = 1.05 * spacing;
  m.bb_lo_ = lo - Vec2{m.cell_, m.cell_};
  m.bb_hi_ = hi + Vec2{m.cell_, m.cell_};
  m.ncx_ = int((m.bb_hi_.x - m.bb_lo_.x) / m.cell_) + 1;
  m.ncy_ = int((m.bb_hi_.y - m.bb_lo_.y) / m.cell_) + 1;
  m.buckets_.assign(std::size_t(m.ncx_) * m.ncy_, {});
  for (int idx = 0; idx < int(m.seed_pts_.size()); ++idx) {
    const Vec2 p = m.seed_pts_[idx];
    const int cx = int((p.x - m.bb_lo_.x) / m.cell_);
    const int cy = int((p.y - m.bb_lo_.y) / m.cell_);
    m.buckets_[std::size_t(cy) * m.ncx_ + cx].push_back(idx);
  }
  return m;
}

// ---------------------------------------------------------------------------
// Stability report
// ---------------------------------------------------------------------------

namespace {

/// Wraps a parameter difference into [-L/2, L/2).
double wrap_diff(double d, double L) { return d - L * std::round(d / L); }

}  // namespace

MapStabilityReport map_stability_report(const TubeMap& base, const TubeMap& pert,
                                        int ns, int ny) {
  const Curve& cb = base.curve();
  const Curve& cp = pert.curve();
  if (cb.closed != cp.closed || std::abs(cb.length - cp.length) > 1e-9 ||
      std::abs(base.tube_radius() - pert.tube_radius()) > 1e-12)
    throw std::invalid_argument(
        "map_stability_report: charts must share parameter domain and radius");

  const bool per = cb.closed;
  const double L = cb.length;
  const double r = base.tube_radius();
  const double ds = per ? L / ns : L / (ns - 1);
  const double dy = 2.0 * r / ny;
  auto sgrid = [&](int i) { return per ? L * i / ns : L * i / (ns - 1); };
  auto ygrid = [&](int j) { return -r + (j + 0.5) * dy; };

  MapStabilityReport rep;

  // Difference field on the strip grid.
  std::vector<Vec2> diff(std::size_t(ns) * ny);
  for (int i = 0; i < ns; ++i)
    for (int j = 0; j < ny; ++j) {
      const Vec2 d = pert.map(sgrid(i), ygrid(j)) - base.map(sgrid(i), ygrid(j));
      diff[std::size_t(i) * ny + j] = d;
      rep.c0 = std::max(rep.c0, d.norm());
    }
  auto at = [&](int i, int j) -> Vec2 {
    if (per) i = (i % ns + ns) % ns;
    return diff[std::size_t(i) * ny + j];
  };
  const int i_lo = per ? 0 : 1, i_hi = per ? ns : ns - 1;
  for (int i = i_lo; i < i_hi; ++i) {
    for (int j = 1; j + 1 < ny; ++j) {
      const Vec2 d_s = (at(i + 1, j) - at(i - 1, j)) / (2.0 * ds);
      const Vec2 d_y = (at(i, j + 1) - at(i, j - 1)) / (2.0 * dy);
      rep.c1 = std::max({rep.c1, d_s.norm(), d_y.norm()});
      const Vec2 d_ss = (at(i + 1, j) - 2.0 * at(i, j) + at(i - 1, j)) / (ds * ds);
      const Vec2 d_yy = (at(i, j + 1) - 2.0 * at(i, j) + at(i, j - 1)) / (dy * dy);
      const Vec2 d_sy = (at(i + 1, j + 1) - at(i + 1, j - 1) - at(i - 1, j + 1) +
                         at(i - 1, j - 1)) /
                        (4.0 * ds * dy);
      rep.c2 = std::max({rep.c2, d_ss.norm(), d_yy.norm(), d_sy.norm()});
    }
  }

  // Inverse distance in chart coordinates over the overlap: the perturbed
  // inverse applied to base images, minus the identity.
  const int ns2 = ns / 2, ny2 = ny / 2;
  std::vector<Vec2> g(std::size_t(ns2) * ny2);
  std::vector<char> ok(std::size_t(ns2) * ny2, 0);
  for (int i = 0; i < ns2; ++i)
    for (int j = 0; j < ny2; ++j) {
      const double s = sgrid(2 * i), y = ygrid(2 * j);
      const auto q = pert.invert(base.map(s, y));
      if (!q) continue;
      const double dsw = per ? wrap_diff(q->s - s, L) : q->s - s;
      g[std::size_t(i) * ny2 + j] = {dsw, q->y - y};
      ok[std::size_t(i) * ny2 + j] = 1;
      rep.inv_c0 = std::max(rep.inv_c0, g[std::size_t(i) * ny2 + j].norm());
    }
  for (int i = 1; i + 1 < ns2; ++i)
    for (int j = 1; j + 1 < ny2; ++j) {
      const auto id = [&](int a, int b) { return std::size_t(a) * ny2 + b; };
      if (!ok[id(i, j)] || !ok[id(i + 1, j)] || !ok[id(i - 1, j)] ||
          !ok[id(i, j + 1)] || !ok[id(i, j - 1)])
        continue;
      const Vec2 g_s = (g[id(i + 1, j)] - g[id(i - 1, j)]) / (4.0 * ds);
      const Vec2 g_y = (g[id(i, j + 1)] - g[id(i, j - 1)]) / (4.0 * dy);
      rep.inv_c1 = std::max({rep.inv_c1, g_s.norm(), g_y.norm()});
    }

  // Two-sided Hausdorff distance between the tube images, from boundary
  // samples. Points of one boundary inside the other tube contribute zero;
  // points outside contribute the distance to the clamped chart projection.
  const int nb = 2 * ns;
  auto one_sided = [&](const TubeMap& from, const TubeMap& to) {
    double h = 0.0;
    auto probe = [&](Vec2 a) {
      const auto q = to.invert_extended(a);
      if (q && std::abs(q->y) <= r) return;  // inside the other tube
      if (q) {
        const double yc = std::clamp(q->y, -r, r);
        h = std::max(h, (a - to.map(q->s, yc)).norm());
        return;
      }
      // Far outside any chart extension (does not happen for small
      // perturbations); coarse fallback over the other boundary samples.
      double dmin = std::numeric_limits<double>::infinity();
      for (int i = 0; i < nb; ++i) {
        const double s = per ? L * i / nb : L * i / (nb - 1);
        for (const double yy : {r, -r})
          dmin = std::min(dmin, (a - to.map(s, yy)).norm());
      }
      h = std::max(h, dmin);
    };
    for (int i = 0; i < nb; ++i) {
      const double s = per ? L * i / nb : L * i / (nb - 1);
      probe(from.map(s, r));
      probe(from.map(s, -r));
    }
    if (!per)
      for (int j = 0; j <= ny; ++j) {
        const double y = -r + j * 2.0 * r / ny;
        probe(from.map(0.0, y));
        probe(from.map(L, y));
      }
    return h;
  };
  rep.hausdorff = std::max(one_sided(pert, base), one_sided(base, pert));
  return rep;
}

}  // namespace qss
