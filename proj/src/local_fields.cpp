#include "qss/local_fields.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>

#include "qss/numerics.hpp"

namespace qss {

namespace {

constexpr double kCoreFraction = 0.6;   ///< window is 1 for |y| <= 0.6 r
constexpr double kOuterFraction = 0.9;  ///< window is 0 for |y| >= 0.9 r
constexpr int kStreamTableNodes = 4096;
constexpr int kFibreRuleNodes = 16;
constexpr int kGaugeAxisSamples = 96;

Vec2 column_s(const Mat2& j) { return j.col(0); }
Vec2 column_y(const Mat2& j) { return j.col(1); }

}  // namespace

// ===========================================================================
// LocalField evaluators
// ===========================================================================

void LocalField::taper(double y, double& w, double& wprime) const {
  const double width = (kOuterFraction - kCoreFraction) * r_;
  const double u = (std::abs(y) - core_) / width;
  if (u <= 0.0) {
    w = 1.0;
    wprime = 0.0;
    return;
  }
  if (u >= 1.0) {
    w = 0.0;
    wprime = 0.0;
    return;
  }
  // Classic smooth step from the pair of flat exponentials: both w and its
  // derivative are C-infinity and exactly flat at the junctions.
  const double A = std::exp(-1.0 / (1.0 - u));
  const double B = std::exp(-1.0 / u);
  const double denom = A + B;
  w = A / denom;
  const double du =
      -A * B * (1.0 / ((1.0 - u) * (1.0 - u)) + 1.0 / (u * u)) /
      (denom * denom);
  wprime = du / width * (y < 0.0 ? -1.0 : 1.0);
}

Vec2 LocalField::raw_velocity_chart(double s, double y) const {
  return (plus_->map(s, y) - minus_->map(s, y)) / (2.0 * dt_);
}

double LocalField::stream_chart(double s, double y) const {
  double psi = interp8(stream_axis_, s / stream_ds_, closed_);
  // Fibre part: integral over eta in [0, y] of -det(dPhi/dt, dPhi/dy).
  if (y != 0.0) {
    double acc = 0.0;
    for (int k = 0; k < kFibreRuleNodes; ++k) {
      const double eta = 0.5 * y * (fibre_rule_.nodes[k] + 1.0);
      const Vec2 vt = raw_velocity_chart(s, eta);
      const Vec2 ey = column_y(centre_->jacobian(s, eta));
      acc += fibre_rule_.weights[k] * -cross(vt, ey);
    }
    psi += 0.5 * y * acc;
  }
  return psi - gauge_;
}

Vec2 LocalField::velocity_chart(double s, double y) const {
  const double ay = std::abs(y);
  if (ay >= outer_) return {};
  const Vec2 vraw = raw_velocity_chart(s, y);
  if (ay <= core_) return vraw;
  double w = 0.0, wp = 0.0;
  taper(y, w, wp);
  const double psi = stream_chart(s, y);
  const Vec2 es = column_s(centre_->jacobian(s, y));
  return w * vraw - (wp * psi) * es;
}

Vec2 LocalField::velocity(Vec2 x) const {
  if (!centre_->near_tube(x)) return {};
  const auto q = centre_->invert(x);
  if (!q) return {};
  return velocity_chart(q->s, q->y);
}

double LocalField::scalar_chart(double y) const {
  return scale_ * profile_.value(y / r_);
}

double LocalField::scalar(Vec2 x) const {
  if (!centre_->near_tube(x)) return 0.0;
  const auto q = centre_->invert(x);
  if (!q) return 0.0;
  return scalar_chart(q->y);
}

Vec2 LocalField::scalar_gradient(Vec2 x) const {
  if (!centre_->near_tube(x)) return {};
  const auto q = centre_->invert(x);
  if (!q) return {};
  const double dp = profile_.derivative(q->y / r_);
  if (dp == 0.0) return {};
  // grad Y is the rotated s-column of the chart Jacobian (unit determinant
  // makes the inverse transpose a rotation of the forward columns).
  const Vec2 grad_y = rot90(column_s(centre_->jacobian(q->s, q->y)));
  return (scale_ * dp / r_) * grad_y;
}

// ===========================================================================
// LocalFieldSet: construction and caching
// ===========================================================================

LocalFieldSet::LocalFieldSet(std::shared_ptr<const CurveFamily> family,
                             int cutoff_order, double time_step)
    : family_(std::move(family)),
      profile_(build_cutoff(cutoff_order)),
      dt_(time_step) {
  if (!family_) {
    throw std::invalid_argument("LocalFieldSet: null curve family");
  }
  if (!(dt_ > 0.0) || dt_ > 1e-2) {
    throw std::invalid_argument(
        "LocalFieldSet: time_step must lie in (0, 1e-2]");
  }
}

std::shared_ptr<const TubeMap> LocalFieldSet::chart(int member,
                                                    double t) const {
  const auto key = std::make_pair(member, t);
  if (auto it = chart_cache_.find(key); it != chart_cache_.end()) {
    return it->second;
  }
  const Curve curve = family_->at(member, t);
  const FrenetData fr = frenet(curve);
  auto map = std::make_shared<TubeMap>(
      build_tube_map(curve, fr, family_->tube_radius()));
  chart_cache_.emplace(key, map);
  return map;
}

const LocalField& LocalFieldSet::field(int member, double t) const {
  const auto key = std::make_pair(member, t);
  if (auto it = field_cache_.find(key); it != field_cache_.end()) {
    return *it->second;
  }

  auto f = std::make_shared<LocalField>(LocalField{});
  f->minus_ = chart(member, t - dt_);
  f->centre_ = chart(member, t);
  f->plus_ = chart(member, t + dt_);
  f->profile_ = profile_;
  f->dt_ = dt_;
  f->r_ = family_->tube_radius();
  f->core_ = kCoreFraction * f->r_;
  f->outer_ = kOuterFraction * f->r_;
  const Curve& curve = f->centre_->curve();
  f->scale_ = 1.0 / std::sqrt(curve.length * f->r_);
  f->closed_ = curve.closed;
  f->fibre_rule_ = gauss_legendre(kFibreRuleNodes);

  // Stream potential along the axis: cumulative integral of
  // det(dPhi/ds, dPhi/dt) at y = 0. Closed members get the affine part
  // removed so the table is periodic (the removed slope is the fibre-mean
  // drift, zero for area-preserving motion up to time-difference error).
  const double L = curve.length;
  const int n = kStreamTableNodes;
  if (curve.closed) {
    const double ds = L / n;
    std::vector<double> t_ext(n + 1);
    for (int k = 0; k <= n; ++k) {
      const double s = std::min(k * ds, L);
      const Vec2 es = column_s(f->centre_->jacobian(s, 0.0));
      t_ext[k] = cross(es, f->raw_velocity_chart(s, 0.0));
    }
    std::vector<double> cum = cumulative_integral(t_ext, ds);
    const double slope = cum.back() / L;
    f->drift_ = std::abs(slope);
    f->stream_axis_.resize(n);
    for (int k = 0; k < n; ++k) f->stream_axis_[k] = cum[k] - slope * (k * ds);
    f->stream_ds_ = ds;
  } else {
    const double ds = L / (n - 1);
    std::vector<double> t_arr(n);
    for (int k = 0; k < n; ++k) {
      const double s = std::min(k * ds, L);
      const Vec2 es = column_s(f->centre_->jacobian(s, 0.0));
      t_arr[k] = cross(es, f->raw_velocity_chart(s, 0.0));
    }
    f->stream_axis_ = cumulative_integral(t_arr, ds);
    f->stream_ds_ = ds;
    f->drift_ = 0.0;
  }

  // Gauge: make the stream potential mean-free over the blend annulus, so
  // the roll-off correction it multiplies is balanced rather than one-sided.
  {
    f->gauge_ = 0.0;
    const GaussRule g4 = gauss_legendre(4);
    double acc = 0.0;
    int count = 0;
    for (int k = 0; k < kGaugeAxisSamples; ++k) {
      const double s = (k + 0.5) * L / kGaugeAxisSamples;
      for (int side : {-1, +1}) {
        for (int q = 0; q < 4; ++q) {
          const double y =
              side * (f->core_ + 0.5 * (g4.nodes[q] + 1.0) *
                                     (f->outer_ - f->core_));
          acc += f->stream_chart(s, y);
          ++count;
        }
      }
    }
    f->gauge_ = acc / count;
  }

  field_cache_.emplace(key, f);
  return *f;
}

double LocalFieldSet::scalar(Vec2 x, double t) const {
  double acc = 0.0;
  for (int m = 0; m < members(); ++m) acc += field(m, t).scalar(x);
  return acc;
}

Vec2 LocalFieldSet::velocity(Vec2 x, double t) const {
  Vec2 acc{};
  for (int m = 0; m < members(); ++m) acc += field(m, t).velocity(x);
  return acc;
}

// ===========================================================================
// Grid drivers
// ===========================================================================

FieldGrids evaluate_fields(const LocalFieldSet& set, int grid_n, double t) {
  FieldGrids out{VectorGrid::zeros(grid_n), ScalarGrid::zeros(grid_n)};
  for (int m = 0; m < set.members(); ++m) {
    const LocalField& f = set.field(m, t);
    for (int i = 0; i < grid_n; ++i) {
      for (int j = 0; j < grid_n; ++j) {
        const Vec2 x = out.scalar.node(i, j);
        if (!f.chart().near_tube(x)) continue;
        const auto q = f.chart().invert(x);
        if (!q) continue;
        out.scalar.at(i, j) += f.scalar_chart(q->y);
        out.velocity.at(i, j) += f.velocity_chart(q->s, q->y);
      }
    }
  }
  return out;
}

TransportResidual transport_residual(const LocalFieldSet& set, int grid_n,
                                     double t) {
  const double dt = set.time_step();
  const FieldGrids now = evaluate_fields(set, grid_n, t);

  // Scalar snapshots at t +- dt for the centred time difference.
  ScalarGrid before = ScalarGrid::zeros(grid_n);
  ScalarGrid after = ScalarGrid::zeros(grid_n);
  for (int m = 0; m < set.members(); ++m) {
    const LocalField& fm = set.field(m, t - dt);
    const LocalField& fp = set.field(m, t + dt);
    for (int i = 0; i < grid_n; ++i) {
      for (int j = 0; j < grid_n; ++j) {
        const Vec2 x = before.node(i, j);
        before.at(i, j) += fm.scalar(x);
        after.at(i, j) += fp.scalar(x);
      }
    }
  }

  TransportResidual r;
  for (int i = 0; i < grid_n; ++i) {
    for (int j = 0; j < grid_n; ++j) {
      const Vec2 grad = grid_gradient(now.scalar, i, j);
      const Vec2 v = now.velocity.at(i, j);
      const double ddt = (after.at(i, j) - before.at(i, j)) / (2.0 * dt);
      r.sup_residual = std::max(r.sup_residual, std::abs(ddt + dot(v, grad)));
      r.sup_gradient = std::max(r.sup_gradient, grad.norm());
      r.sup_velocity = std::max(r.sup_velocity, v.norm());
    }
  }
  return r;
}

double divergence_residual(const LocalFieldSet& set, int grid_n, double t) {
  double worst = 0.0;
  for (int m = 0; m < set.members(); ++m) {
    const LocalField& f = set.field(m, t);
    // Step far below the roll-off layer width (~0.3 r): the fourth-order
    // truncation of the layer's fifth derivative is the floor, and at
    // halfwidth/3000 it sits near 1e-6 while round-off stays below 1e-9.
    const double h = f.chart().min_halfwidth() / 3000.0;
    for (int i = 0; i < grid_n; ++i) {
      for (int j = 0; j < grid_n; ++j) {
        const Vec2 x{i * 1.0 / grid_n, j * 1.0 / grid_n};
        if (!f.chart().near_tube(x)) continue;
        if (!f.chart().invert(x)) continue;
        // Fourth-order centred cross; the field is smooth through the tube
        // edge (it rolls off to an exact zero), so no one-sidedness needed.
        const auto vel = [&](double ax, double ay) {
          return f.velocity({ax, ay});
        };
        const double dvx =
            (-vel(x.x + 2 * h, x.y).x + 8.0 * vel(x.x + h, x.y).x -
             8.0 * vel(x.x - h, x.y).x + vel(x.x - 2 * h, x.y).x) /
            (12.0 * h);
        const double dvy =
            (-vel(x.x, x.y + 2 * h).y + 8.0 * vel(x.x, x.y + h).y -
             8.0 * vel(x.x, x.y - h).y + vel(x.x, x.y - 2 * h).y) /
            (12.0 * h);
        worst = std::max(worst, std::abs(dvx + dvy));
      }
    }
  }
  return worst;
}

FieldStabilityReport field_stability_report(const LocalFieldSet& a,
                                            const LocalFieldSet& b, int grid_n,
                                            double t) {
  const FieldGrids fa = evaluate_fields(a, grid_n, t);
  const FieldGrids fb = evaluate_fields(b, grid_n, t);

  ScalarGrid dtheta = ScalarGrid::zeros(grid_n);
  VectorGrid dv = VectorGrid::zeros(grid_n);
  for (int i = 0; i < grid_n; ++i) {
    for (int j = 0; j < grid_n; ++j) {
      dtheta.at(i, j) = fa.scalar.at(i, j) - fb.scalar.at(i, j);
      dv.at(i, j) = fa.velocity.at(i, j) - fb.velocity.at(i, j);
    }
  }

  FieldStabilityReport rep;
  const double inv = 1.0 / (2.0 * dtheta.dx());
  for (int i = 0; i < grid_n; ++i) {
    for (int j = 0; j < grid_n; ++j) {
      rep.scalar_c0 = std::max(rep.scalar_c0, std::abs(dtheta.at(i, j)));
      rep.velocity_c0 = std::max(rep.velocity_c0, dv.at(i, j).norm());
      rep.scalar_c1 =
          std::max(rep.scalar_c1, grid_gradient(dtheta, i, j).norm());
      const Vec2 dvx = (dv.atw(i + 1, j) - dv.atw(i - 1, j)) * inv;
      const Vec2 dvy = (dv.atw(i, j + 1) - dv.atw(i, j - 1)) * inv;
      rep.velocity_c1 = std::max(
          rep.velocity_c1,
          std::max(std::max(std::abs(dvx.x), std::abs(dvx.y)),
                   std::max(std::abs(dvy.x), std::abs(dvy.y))));
    }
  }
  rep.scalar_c1 = std::max(rep.scalar_c1, rep.scalar_c0);
  rep.velocity_c1 = std::max(rep.velocity_c1, rep.velocity_c0);
  return rep;
}

}  // namespace qss
