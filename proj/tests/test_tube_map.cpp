#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>
#include <vector>

#include "qss/curve.hpp"
#include "qss/curve_family.hpp"
#include "qss/numerics.hpp"
#include "qss/tube_map.hpp"

using namespace qss;
namespace {
constexpr double kPi = std::numbers::pi;

/// Jacobian of a chart by centred finite differences of its images.
Mat2 fd_jacobian(const TubeMap& m, double s, double y, double hs, double hy) {
  const Vec2 ds = (m.map(s + hs, y) - m.map(s - hs, y)) / (2.0 * hs);
  const Vec2 dy = (m.map(s, y + hy) - m.map(s, y - hy)) / (2.0 * hy);
  return Mat2::from_columns(ds, dy);
}
}  // namespace

// ==== normal offset ========================================================

TEST_CASE("normal offset: flat limit, defining equation, annulus areas") {
  // Straight curve: offset is the rescaled coordinate itself.
  CHECK(normal_offset(0.0, 0.3, 2.0) == doctest::Approx(0.15).epsilon(1e-15));

  // The returned branch satisfies b - (kappa/2) b^2 = y/speed.
  Rng rng(2024);
  for (int k = 0; k < 400; ++k) {
    const double kappa = rng.uniform(-3.0, 3.0);
    const double speed = rng.uniform(0.5, 2.0);
    const double y = rng.uniform(-0.4, 0.4) * speed / std::max(std::abs(kappa), 0.5);
    const double b = normal_offset(kappa, y, speed);
    CHECK(std::abs(b - 0.5 * kappa * b * b - y / speed) < 1e-12);
  }
  // Series branch stays on the same solution family.
  const double b9 = normal_offset(1e-9, 0.3, 1.0);
  CHECK(std::abs(b9 - 0.5e-9 * b9 * b9 - 0.3) < 1e-12);

  // Circle fibres enclose annuli of exactly the strip area: solve
  // "area between radius R and R - b equals 2 pi R y" by quadrature and
  // bisection, independently of the closed form.
  const double R = 0.4;
  auto annulus_area = [&](double b) {
    const int q = 64;
    std::vector<double> rho(q + 1);
    for (int i = 0; i <= q; ++i)
      rho[i] = 2.0 * kPi * (R - b + b * double(i) / q);
    return simpson(rho, std::abs(b) / q) * (b >= 0.0 ? 1.0 : -1.0);
  };
  for (const double y : {0.05, 0.1, -0.08}) {
    double lo = -0.3, hi = 0.3;
    for (int it = 0; it < 80; ++it) {
      const double mid = 0.5 * (lo + hi);
      (annulus_area(mid) < 2.0 * kPi * R * y ? lo : hi) = mid;
    }
    CHECK(normal_offset(1.0 / R, y, 1.0) ==
          doctest::Approx(0.5 * (lo + hi)).epsilon(1e-12));
  }

  // Fibres reaching the focal distance are rejected.
  CHECK_THROWS_AS(normal_offset(2.5, 0.3, 1.0), std::invalid_argument);
}

TEST_CASE("perturbed offset fixed point") {
  const int n = 32;
  // Identical geometry: the correction is zero after a single sweep.
  std::vector<double> kap(n, 1.3), sp(n, 0.8), b0(n);
  for (int i = 0; i < n; ++i) b0[i] = normal_offset(kap[i], 0.1, sp[i]);
  const auto same = perturbed_offset_fixed_point(kap, kap, b0, sp, sp, 0.1);
  CHECK(same.converged);
  CHECK(same.iterations == 1);
  for (int i = 0; i < n; ++i) CHECK(same.beta[i] == b0[i]);

  // Concentric-circle perturbation: the fixed point lands on the closed form
  // evaluated with the perturbed curvature and speed.
  const Curve base = make_circle({0.5, 0.5}, 0.25, +1, 1024);
  const FrenetData fr = frenet(base);
  const double c = 1e-3;
  const Curve moved = offset_curve(base, fr, std::vector<double>(base.size(), c));
  const FrenetData frp = frenet(moved);
  for (const double y : {0.03, -0.02}) {
    std::vector<double> beta_base(base.size());
    for (int i = 0; i < base.size(); ++i)
      beta_base[i] = normal_offset(fr.kappa[i], y, fr.speed[i]);
    const auto fp = perturbed_offset_fixed_point(frp.kappa, fr.kappa, beta_base,
                                                 frp.speed, fr.speed, y);
    CHECK(fp.converged);
    CHECK(fp.iterations < 60);
    for (int i = 0; i < base.size(); ++i)
      CHECK(std::abs(fp.beta[i] - normal_offset(frp.kappa[i], y, frp.speed[i])) <
            1e-10);
  }

  // The correction is first order in the perturbation size.
  std::vector<double> eps{1e-1, 1e-2, 1e-3, 1e-4};
  std::vector<double> dev;
  for (const double e : eps) {
    const double ce = e * 0.25;
    const Curve mv = offset_curve(base, fr, std::vector<double>(base.size(), ce));
    const FrenetData fe = frenet(mv);
    std::vector<double> beta_base(base.size());
    for (int i = 0; i < base.size(); ++i)
      beta_base[i] = normal_offset(fr.kappa[i], 0.03, fr.speed[i]);
    const auto fp = perturbed_offset_fixed_point(fe.kappa, fr.kappa, beta_base,
                                                 fe.speed, fr.speed, 0.03);
    double sup = 0.0;
    for (int i = 0; i < base.size(); ++i)
      sup = std::max(sup, std::abs(fp.beta[i] - beta_base[i]));
    dev.push_back(sup);
  }
  CHECK(loglog_slope(eps, dev) == doctest::Approx(1.0).epsilon(0.05));
}

// ==== chart construction and Jacobians =====================================

TEST_CASE("straight chart is an exact shear with unit Jacobian") {
  const Curve seg = make_segment({0.1, 0.2}, {0.9, 0.6}, 512);
  const FrenetData fr = frenet(seg);
  const TubeMap m = build_tube_map(seg, fr, 0.05);
  const Vec2 tau = (Vec2{0.9, 0.6} - Vec2{0.1, 0.2}) / seg.length;
  const Vec2 eta = rot90(tau);
  Rng rng(7);
  for (int k = 0; k < 50; ++k) {
    const double s = rng.uniform(0.05, 0.95) * seg.length;
    const double y = rng.uniform(-0.9, 0.9) * 0.05;
    const Vec2 exact = Vec2{0.1, 0.2} + s * tau + y * eta;
    CHECK((m.map(s, y) - exact).norm() < 1e-10);
    const Mat2 jac = fd_jacobian(m, s, y, 1e-6, 1e-6);
    CHECK(std::abs(jac.det() - 1.0) < 2e-9);
  }
}

TEST_CASE("circle and perturbed-circle charts preserve area") {
  const Curve base = make_circle({0.5, 0.5}, 0.25, +1, 2048);
  const FrenetData fr = frenet(base);
  const double r = 0.0625;
  const TubeMap mb = build_tube_map(base, fr, r);

  for (int i = 0; i < 64; ++i) {
    for (int j = 1; j < 16; ++j) {
      const double s = base.length * i / 64;
      const double y = -r + j * 2.0 * r / 16;
      const Mat2 fd = fd_jacobian(mb, s, y, 1e-5, 1e-5);
      CHECK(std::abs(fd.det() - 1.0) < 1e-8);
      const Mat2 an = mb.jacobian(s, y);
      CHECK(std::abs(an.det() - 1.0) < 1e-9);
      CHECK((fd - an).frobenius() < 1e-7);
    }
  }

  // A smooth normal perturbation keeps the determinant pinned: the perturbed
  // offsets absorb the variable parametrisation speed.
  const auto gen = fourier_slice_generator(1e-2, r, 5);
  const Curve moved = offset_curve(base, fr, gen(0, 0.3, base, fr));
  const TubeMap mp = build_tube_map(moved, frenet(moved), r);
  for (int i = 0; i < 64; ++i) {
    for (int j = 1; j < 16; ++j) {
      const double s = base.length * i / 64;
      const double y = -r + j * 2.0 * r / 16;
      CHECK(std::abs(fd_jacobian(mp, s, y, 1e-5, 1e-5).det() - 1.0) < 1e-6);
    }
  }

  // Tubes reaching the focal margin are rejected at build time.
  CHECK_THROWS_AS(build_tube_map(base, fr, 0.2), std::invalid_argument);
  CHECK_THROWS_AS(build_tube_map(base, fr, 0.1), std::invalid_argument);
}

// ==== inversion ============================================================

TEST_CASE("inversion round-trips ten thousand interior points") {
  Rng rng(99);
  auto round_trip = [&](const TubeMap& m, int count) {
    const double L = m.curve().length;
    const double r = m.tube_radius();
    for (int k = 0; k < count; ++k) {
      const double s = rng.uniform(0.0, 1.0) * L;
      const double y = rng.uniform(-0.999, 0.999) * r;
      const auto q = m.invert(m.map(s, y));
      REQUIRE(q.has_value());
      const double dserr = m.curve().closed
                               ? std::abs(std::remainder(q->s - s, L))
                               : std::abs(q->s - s);
      CHECK(dserr < 1e-10);
      CHECK(std::abs(q->y - y) < 1e-10);
    }
  };

  const Curve circle = make_circle({0.5, 0.5}, 0.25, +1, 2048);
  const FrenetData frc = frenet(circle);
  const TubeMap mc = build_tube_map(circle, frc, 0.0625);
  round_trip(mc, 4000);

  // Centerline points come back with zero offset.
  const auto q0 = mc.invert(circle.pts[137]);
  REQUIRE(q0.has_value());
  CHECK(std::abs(q0->y) < 1e-10);
  CHECK(std::abs(std::remainder(q0->s - 137 * circle.ds(), circle.length)) < 1e-10);

  const auto gen = fourier_slice_generator(1e-2, 0.0625, 5);
  const Curve moved = offset_curve(circle, frc, gen(0, 0.3, circle, frc));
  round_trip(build_tube_map(moved, frenet(moved), 0.0625), 2000);

  SnakeFamily snake;
  const Curve band = snake.at(3, 0.6);
  round_trip(build_tube_map(band, frenet(band), snake.tube_radius()), 4000);
}

TEST_CASE("points beyond the tube report outside") {
  const Curve circle = make_circle({0.5, 0.5}, 0.25, +1, 2048);
  const FrenetData fr = frenet(circle);
  const double r = 0.0625;
  const TubeMap m = build_tube_map(circle, fr, r);

  CHECK_FALSE(m.invert({0.5, 0.5}).has_value());        // centre of the circle
  CHECK_FALSE(m.invert({0.95, 0.95}).has_value());      // far corner
  CHECK_FALSE(m.invert({0.5 + 0.25 + 0.2, 0.5}).has_value());  // 2r past the rim

  // Just beyond the fibre end: the root is found but classified outside,
  // while the extended search still reports it.
  const Vec2 a = m.map(0.3, 1.05 * r);
  CHECK_FALSE(m.invert(a).has_value());
  const auto ext = m.invert_extended(a);
  REQUIRE(ext.has_value());
  CHECK(ext->y == doctest::Approx(1.05 * r).epsilon(1e-8));
  // Just inside stays inside.
  CHECK(m.invert(m.map(0.3, 0.999 * r)).has_value());
}

// ==== stability report =====================================================

TEST_CASE("stability report vanishes for identical charts") {
  SnakeFamily snake;
  const Curve band = snake.at(2, 0.5);
  const TubeMap m = build_tube_map(band, frenet(band), snake.tube_radius());
  const MapStabilityReport rep = map_stability_report(m, m, 96, 24);
  CHECK(rep.c0 == 0.0);
  CHECK(rep.c1 == 0.0);
  CHECK(rep.c2 == 0.0);
  CHECK(rep.inv_c0 < 1e-9);
  CHECK(rep.inv_c1 < 1e-7);
  CHECK(rep.hausdorff < 1e-9);
}

TEST_CASE("all chart distances scale linearly in the perturbation size") {
  const Curve base = make_circle({0.5, 0.5}, 0.25, +1, 1024);
  const FrenetData fr = frenet(base);
  const double r = 0.05;
  const TubeMap mb = build_tube_map(base, fr, r);

  const std::vector<double> eps{3e-2, 3e-3, 3e-4, 3e-5};
  std::vector<double> c0, c1, c2, i0, i1, hd;
  for (const double e : eps) {
    const auto gen = fourier_slice_generator(e, r, 11);
    const Curve moved = offset_curve(base, fr, gen(0, 0.4, base, fr));
    const TubeMap mp = build_tube_map(moved, frenet(moved), r);
    const MapStabilityReport rep = map_stability_report(mb, mp, 128, 32);
    c0.push_back(rep.c0);
    c1.push_back(rep.c1);
    c2.push_back(rep.c2);
    i0.push_back(rep.inv_c0);
    i1.push_back(rep.inv_c1);
    hd.push_back(rep.hausdorff);
  }
  for (const auto* v : {&c0, &c1, &c2, &i0, &i1, &hd})
    CHECK(loglog_slope(eps, *v) == doctest::Approx(1.0).epsilon(0.1));
}

TEST_CASE("matrix-inverse difference obeys the Lipschitz bound at samples") {
  const Curve base = make_circle({0.5, 0.5}, 0.25, +1, 1024);
  const FrenetData fr = frenet(base);
  const double r = 0.05;
  const TubeMap mb = build_tube_map(base, fr, r);
  const auto gen = fourier_slice_generator(1e-2, r, 11);
  const Curve moved = offset_curve(base, fr, gen(0, 0.4, base, fr));
  const TubeMap mp = build_tube_map(moved, frenet(moved), r);

  Rng rng(321);
  for (int k = 0; k < 1000; ++k) {
    const double s = rng.uniform(0.0, 1.0) * base.length;
    const double y = rng.uniform(-0.95, 0.95) * r;
    const Mat2 A = mb.jacobian(s, y), B = mp.jacobian(s, y);
    const double K = std::max(A.inverse().opnorm(), B.inverse().opnorm());
    CHECK((A.inverse() - B.inverse()).opnorm() <=
          K * K * (A - B).opnorm() * (1.0 + 1e-10) + 1e-15);
  }
}
