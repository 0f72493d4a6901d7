#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <memory>
#include <vector>

#include "doctest.h"
#include "qss/curve_family.hpp"
#include "qss/local_fields.hpp"
#include "qss/numerics.hpp"

using namespace qss;

namespace {

std::shared_ptr<RotatingCircleFamily> rot_circle(double omega) {
  return std::make_shared<RotatingCircleFamily>(Vec2{0.5, 0.5}, 0.25, omega,
                                                512);
}

}  // namespace

// ===========================================================================
// Rigid-motion oracles
// ===========================================================================

TEST_CASE("static family: velocity vanishes identically, transport is exact") {
  LocalFieldSet set(rot_circle(0.0), 6);
  const LocalField& f = set.field(0, 0.3);

  // The three charts coincide, so the centred difference and the stream
  // table are exact zeros, not merely small.
  for (int k = 0; k < 50; ++k) {
    const double s = f.chart().curve().length * k / 50.0;
    for (double yf : {-0.85, -0.3, 0.0, 0.45, 0.75}) {
      const Vec2 x = f.chart().map(s, yf * f.tube_radius());
      const Vec2 v = f.velocity(x);
      CHECK(v.x == 0.0);
      CHECK(v.y == 0.0);
    }
  }
  CHECK(f.removed_drift() == 0.0);

  const TransportResidual r = transport_residual(set, 128, 0.3);
  CHECK(r.sup_residual == 0.0);
  CHECK(r.sup_velocity == 0.0);
  CHECK(r.sup_gradient > 100.0);  // the scalar itself is present
}

TEST_CASE("rigid translation: velocity equals the translation speed") {
  const Vec2 w{0.11, -0.06};
  auto fam = std::make_shared<TranslatingCircleFamily>(Vec2{0.4, 0.55}, 0.2, w,
                                                       512);
  LocalFieldSet set(fam, 6);
  const double t = 0.45;
  const LocalField& f = set.field(0, t);

  double worst = 0.0;
  for (int k = 0; k < 200; ++k) {
    const double s = f.chart().curve().length * (k + 0.41) / 200.0;
    for (double yf : {-0.59, -0.22, 0.0, 0.37, 0.55}) {
      const Vec2 x = f.chart().map(s, yf * f.tube_radius());
      worst = std::max(worst, (f.velocity(x) - w).norm());
    }
  }
  CHECK(worst < 1e-9);

  // The scalar rides along: Theta(x + dt w, t + dt) = Theta(x, t).
  const LocalField& g = set.field(0, t + 0.3);
  double worst_theta = 0.0;
  for (int k = 0; k < 100; ++k) {
    const double s = f.chart().curve().length * (k + 0.13) / 100.0;
    const Vec2 x = f.chart().map(s, 0.31 * f.tube_radius());
    worst_theta =
        std::max(worst_theta, std::abs(g.scalar(x + 0.3 * w) - f.scalar(x)));
  }
  CHECK(worst_theta < 1e-9);
}

TEST_CASE("rotating circle: velocity matches the angular field in the core") {
  LocalFieldSet set(rot_circle(0.7), 6);
  const double t = 0.4;
  const LocalField& f = set.field(0, t);
  const double r = f.tube_radius();

  double worst = 0.0;
  for (int k = 0; k < 400; ++k) {
    const double s = f.chart().curve().length * (k + 0.3) / 400.0;
    for (double yf : {-0.55, -0.2, 0.0, 0.3, 0.59}) {
      const Vec2 x = f.chart().map(s, yf * r);
      const Vec2 want = 0.7 * rot90(x - Vec2{0.5, 0.5});
      worst = std::max(worst, (f.velocity(x) - want).norm());
    }
  }
  CHECK(worst < 1e-6);  // measured 3.3e-10

  // Beyond the roll-off the field is exactly zero; just inside it has
  // already decayed through the flat window tail.
  for (int k = 0; k < 60; ++k) {
    const double s = f.chart().curve().length * (k + 0.7) / 60.0;
    const Vec2 out1 = f.velocity(f.chart().map(s, 0.91 * r));
    CHECK(out1.x == 0.0);
    CHECK(out1.y == 0.0);
    CHECK(f.velocity(f.chart().map(s, 0.899 * r)).norm() < 1e-8);
  }

  // Rigid rotation preserves enclosed area: no fibre-mean drift to remove.
  CHECK(f.removed_drift() < 1e-10);
}

// ===========================================================================
// Scalar: normalisation, support, gradient
// ===========================================================================

TEST_CASE("scalar has zero mean and unit norm on the square") {
  LocalFieldSet set(rot_circle(0.7), 6);
  for (double t : {0.2, 0.8}) {
    const FieldGrids g = evaluate_fields(set, 512, t);
    CHECK(std::abs(g.scalar.integral()) < 1e-6);            // measured 9e-11
    const double l2 = g.scalar.l2norm();
    CHECK(std::abs(l2 * l2 - 1.0) < 1e-6);                  // measured 6e-12
  }
}

TEST_CASE("scalar profile, support, and analytic gradient") {
  LocalFieldSet set(rot_circle(0.7), 6);
  const LocalField& f = set.field(0, 0.25);
  const double r = f.tube_radius();
  const double L = f.chart().curve().length;
  const double scale = 1.0 / std::sqrt(L * r);

  for (int k = 0; k < 120; ++k) {
    const double s = L * (k + 0.37) / 120.0;
    // Profile composition at chart points.
    for (double yf : {-0.44, -0.1, 0.21, 0.49}) {
      const Vec2 x = f.chart().map(s, yf * r);
      CHECK(f.scalar(x) ==
            doctest::Approx(scale * set.cutoff().value(yf)).epsilon(1e-10));
    }
    // Support cuts off at half the chart radius, inside the velocity core.
    CHECK(f.scalar(f.chart().map(s, 0.51 * r)) == 0.0);
    CHECK(f.scalar(f.chart().map(s, -0.53 * r)) == 0.0);
  }

  // Analytic gradient vs centred differences in both axes.
  double worst = 0.0, sup_grad = 0.0;
  const double h = 1e-6;
  for (int k = 0; k < 80; ++k) {
    const double s = L * (k + 0.11) / 80.0;
    for (double yf : {-0.38, 0.07, 0.31}) {
      const Vec2 x = f.chart().map(s, yf * r);
      const Vec2 grad = f.scalar_gradient(x);
      const double gx =
          (f.scalar({x.x + h, x.y}) - f.scalar({x.x - h, x.y})) / (2 * h);
      const double gy =
          (f.scalar({x.x, x.y + h}) - f.scalar({x.x, x.y - h})) / (2 * h);
      worst = std::max(worst, (grad - Vec2{gx, gy}).norm());
      sup_grad = std::max(sup_grad, grad.norm());
    }
  }
  CHECK(worst < 1e-4 * sup_grad);
}

TEST_CASE("thin-tube members: exact zero mean, resolution-limited norm") {
  auto snake = std::make_shared<SnakeFamily>();
  LocalFieldSet set(snake, 6);
  const double t = 0.45;

  const FieldGrids g1 = evaluate_fields(set, 512, t);
  const FieldGrids g2 = evaluate_fields(set, 1024, t);
  CHECK(std::abs(g1.scalar.integral()) < 1e-8);
  CHECK(std::abs(g2.scalar.integral()) < 1e-8);

  // Six members, each unit norm on disjoint tubes. The tubes are only a few
  // grid cells wide, so plain grid quadrature is pre-asymptotic here: the
  // error depends on how the grid phases against each tube (measured 1.8e-3
  // at 512, 5.8e-3 at 1024 — sub-percent but not monotone). The assembly
  // diagnostics therefore use the chart-side identity, never this
  // quadrature; this check only pins the honest ballpark.
  const double e1 = std::abs(g1.scalar.l2norm() * g1.scalar.l2norm() - 6.0);
  const double e2 = std::abs(g2.scalar.l2norm() * g2.scalar.l2norm() - 6.0);
  CHECK(e1 < 1e-2);
  CHECK(e2 < 1e-2);
}

// ===========================================================================
// Compact support
// ===========================================================================

TEST_CASE("fields vanish outside the family's support box") {
  auto snake = std::make_shared<SnakeFamily>();
  const auto box = snake->support();
  // The box itself sits strictly inside the unit square.
  CHECK(box.x0 > 0.0);
  CHECK(box.y0 > 0.0);
  CHECK(box.x1 < 1.0);
  CHECK(box.y1 < 1.0);

  LocalFieldSet base(snake, 6);
  auto gen = fourier_slice_generator(1e-2, snake->tube_radius(), 77);
  LocalFieldSet pert(std::make_shared<PerturbedFamily>(snake, gen, false), 6);

  const double t = 0.6;
  const int n = 256;
  const FieldGrids gb = evaluate_fields(base, n, t);
  const FieldGrids gp = evaluate_fields(pert, n, t);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const Vec2 x = gb.scalar.node(i, j);
      const bool inside = x.x >= box.x0 && x.x <= box.x1 && x.y >= box.y0 &&
                          x.y <= box.y1;
      if (inside) continue;
      CHECK(gb.scalar.at(i, j) == 0.0);
      CHECK(gb.velocity.at(i, j).norm() == 0.0);
      // The same fixed box also contains every perturbed support at
      // perturbation sizes up to 1e-2.
      CHECK(gp.scalar.at(i, j) == 0.0);
      CHECK(gp.velocity.at(i, j).norm() == 0.0);
    }
  }
}

// ===========================================================================
// Divergence and edge smoothness
// ===========================================================================

TEST_CASE("velocity is solenoidal: mesh-free divergence probe") {
  LocalFieldSet circle(rot_circle(0.7), 6);
  CHECK(divergence_residual(circle, 192, 0.4) < 1e-4);  // measured 1.8e-6

  auto snake = std::make_shared<SnakeFamily>();
  LocalFieldSet sset(snake, 6);
  CHECK(divergence_residual(sset, 128, 0.45) < 1e-4);  // measured 3.3e-6

  // Perturbed (non-rigid) motion keeps the property: the roll-off is built
  // from a stream potential, not from damping the components.
  auto gen = fourier_slice_generator(1e-2, 0.0625, 31);
  LocalFieldSet pset(
      std::make_shared<PerturbedFamily>(rot_circle(0.7), gen, false), 6);
  CHECK(divergence_residual(pset, 96, 0.4) < 1e-4);
}

TEST_CASE("velocity decays continuously through the tube edge") {
  LocalFieldSet set(rot_circle(0.7), 6);
  const LocalField& f = set.field(0, 0.4);
  const double r = f.tube_radius();
  const double s0 = 0.37 * f.chart().curve().length;

  // Discontinuity detector: the largest jump between adjacent samples along
  // a fibre ray must shrink linearly under step refinement. A genuine jump
  // would stay put.
  const auto max_jump = [&](int steps) {
    double worst = 0.0;
    Vec2 prev = f.velocity(f.chart().map(s0, 0.55 * r));
    for (int k = 1; k <= steps; ++k) {
      const double y = (0.55 + 0.55 * k / steps) * r;  // crosses 0.9 r
      const Vec2 x = f.chart().map(s0, std::min(y, 1.099 * r));
      const Vec2 v = y < 1.1 * r ? f.velocity(x) : Vec2{};
      worst = std::max(worst, (v - prev).norm());
      prev = v;
    }
    return worst;
  };
  const double coarse = max_jump(200);
  const double fine = max_jump(800);
  CHECK(fine < 0.35 * coarse + 1e-12);
}

// ===========================================================================
// Transport residuals
// ===========================================================================

TEST_CASE("transport defect: rotating circle converges under refinement") {
  LocalFieldSet set(rot_circle(0.08), 6);
  const double t = 0.4;

  const TransportResidual r256 = transport_residual(set, 256, t);
  const TransportResidual r512 = transport_residual(set, 512, t);

  // Contract: small against the scalar's own gradient scale.
  CHECK(r256.sup_residual < 1e-3 * r256.sup_gradient);  // measured 5.3e-4
  CHECK(r512.sup_residual < 1e-3 * r512.sup_gradient);  // measured 1.3e-4

  // Second-order spatial differencing: doubling the grid at least halves
  // the defect (measured factor ~0.26).
  CHECK(r512.sup_residual < 0.5 * r256.sup_residual);
}

TEST_CASE("transport defect: slow rotation meets the tightened bound") {
  LocalFieldSet set(rot_circle(0.01), 6);
  const TransportResidual r = transport_residual(set, 512, 0.4);
  CHECK(r.sup_residual < 1e-4 * r.sup_gradient);  // measured 1.7e-5
}

TEST_CASE("transport defect: thin open tubes converge toward the contract") {
  auto snake = std::make_shared<SnakeFamily>();
  LocalFieldSet set(snake, 6);
  const double t = 0.45;

  const TransportResidual r512 = transport_residual(set, 512, t);
  const TransportResidual r1024 = transport_residual(set, 1024, t);

  // The tube is ~4 cells wide at 512, so the gradient stencil is not yet in
  // its asymptotic regime there; the defect still quarters per refinement
  // (measured 5.1e-3 -> 1.2e-3 relative) and crosses the 1e-3 contract at
  // 2048 (measured separately; kept out of the routine suite for runtime).
  CHECK(r1024.sup_residual < 0.5 * r512.sup_residual);
  CHECK(r1024.sup_residual < 2.5e-3 * r1024.sup_gradient);
  // End caps: the envelope pins the curve ends, so the open ends introduce
  // no spurious defect despite the scalar ending abruptly there.
  CHECK(r512.sup_residual < 1e-2 * r512.sup_gradient);
}

// ===========================================================================
// Stability reports
// ===========================================================================

TEST_CASE("identical sets give exactly zero distances") {
  LocalFieldSet a(rot_circle(0.7), 6);
  LocalFieldSet b(rot_circle(0.7), 6);
  const FieldStabilityReport rep = field_stability_report(a, b, 128, 0.35);
  CHECK(rep.velocity_c0 == 0.0);
  CHECK(rep.velocity_c1 == 0.0);
  CHECK(rep.scalar_c0 == 0.0);
  CHECK(rep.scalar_c1 == 0.0);
}

TEST_CASE("perturbation sweep: C0/C1 distances scale linearly") {
  auto base = rot_circle(0.7);
  LocalFieldSet bset(base, 6);
  const double t = 0.4;
  const int n = 192;

  // Amplitude scale: a tenth of the tube radius keeps even eps = 1e-1
  // displacements well below the scalar's variation scale r/2, so all four
  // decades sit in the linear-response regime. (At full tube-radius scale
  // the top decade saturates against the ceiling 2 sup|Theta| and the
  // fitted slope drops to ~0.87.)
  const double amp = base->tube_radius() / 10.0;
  const std::vector<double> eps{1e-1, 1e-2, 1e-3, 1e-4};
  std::vector<double> vc0, vc1, tc0, tc1;
  for (double e : eps) {
    auto gen = fourier_slice_generator(e, amp, 11);
    LocalFieldSet pset(std::make_shared<PerturbedFamily>(base, gen, false), 6);
    const FieldStabilityReport rep = field_stability_report(bset, pset, n, t);
    vc0.push_back(rep.velocity_c0);
    vc1.push_back(rep.velocity_c1);
    tc0.push_back(rep.scalar_c0);
    tc1.push_back(rep.scalar_c1);
  }
  for (const auto& series : {vc0, vc1, tc0, tc1}) {
    const double slope = loglog_slope(eps, series);
    CHECK(slope > 0.9);  // measured 0.998-1.001 across the four series
    CHECK(slope < 1.1);
  }
}

TEST_CASE("perturbed-pair differences stay continuous across tube edges") {
  auto base = rot_circle(0.7);
  LocalFieldSet bset(base, 6);
  auto gen = fourier_slice_generator(1e-2, base->tube_radius(), 23);
  LocalFieldSet pset(std::make_shared<PerturbedFamily>(base, gen, false), 6);
  const double t = 0.4;

  const LocalField& fb = bset.field(0, t);
  const double r = fb.tube_radius();
  const double s0 = 0.61 * fb.chart().curve().length;

  // Scan the assembled difference along a ray running from inside the core,
  // through both roll-off layers and both tube boundaries, into the common
  // exterior. Refining the sampling must shrink the largest jump linearly:
  // the four support regions join with no cliffs.
  const auto max_jump = [&](int steps) {
    double worst_v = 0.0, worst_t = 0.0;
    Vec2 pv{};
    double pt = 0.0;
    bool first = true;
    for (int k = 0; k <= steps; ++k) {
      const double y = (0.3 + 1.0 * k / steps) * r;
      const Vec2 x = fb.chart().map(s0, std::min(y, 1.19 * r));
      const Vec2 dv = bset.velocity(x, t) - pset.velocity(x, t);
      const double dth = bset.scalar(x, t) - pset.scalar(x, t);
      if (!first) {
        worst_v = std::max(worst_v, (dv - pv).norm());
        worst_t = std::max(worst_t, std::abs(dth - pt));
      }
      pv = dv;
      pt = dth;
      first = false;
    }
    return std::make_pair(worst_v, worst_t);
  };
  const auto [cv, ct] = max_jump(250);
  const auto [fv, ft] = max_jump(1000);
  CHECK(fv < 0.35 * cv + 1e-12);
  CHECK(ft < 0.35 * ct + 1e-12);
}
