#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <memory>
#include <numbers>

#include "qss/curve_family.hpp"
#include "qss/perturbation.hpp"

using namespace qss;
namespace {
constexpr double kPi = std::numbers::pi;

/// Centred finite-difference motion field of a family member at fixed
/// parameter label: (gamma(t+d) - gamma(t-d)) / 2d.
std::vector<Vec2> fd_velocity(const CurveFamily& fam, int member, double t,
                              double delta = 1e-6) {
  const Curve a = fam.at(member, t - delta);
  const Curve b = fam.at(member, t + delta);
  std::vector<Vec2> v(a.size());
  for (int i = 0; i < a.size(); ++i) v[i] = (b.pts[i] - a.pts[i]) / (2.0 * delta);
  return v;
}
}  // namespace

// ==== rigid families: exact motion oracles =================================

TEST_CASE("rotating circle: motion field is omega x perp about the centre") {
  const Vec2 c{0.5, 0.5};
  const double R = 0.25, omega = 0.7;
  RotatingCircleFamily fam(c, R, omega, 256);
  for (double t : {0.0, 0.3, 0.8}) {
    const Curve curve = fam.at(0, t);
    const auto v = fd_velocity(fam, 0, t);
    for (int i = 0; i < curve.size(); i += 17) {
      const Vec2 expected = omega * rot90(curve.pts[i] - c);
      CHECK(v[i].x == doctest::Approx(expected.x).epsilon(1e-8).scale(1.0));
      CHECK(v[i].y == doctest::Approx(expected.y).epsilon(1e-8).scale(1.0));
    }
  }
}

TEST_CASE("translating circle: motion field is the translation velocity") {
  const Vec2 w{0.2, -0.1};
  TranslatingCircleFamily fam({0.4, 0.5}, 0.2, w, 128);
  const auto v = fd_velocity(fam, 0, 0.5);
  for (const Vec2& vi : v) {
    CHECK(vi.x == doctest::Approx(w.x).epsilon(1e-10));
    CHECK(vi.y == doctest::Approx(w.y).epsilon(1e-10));
  }
}

TEST_CASE("rotating stadium: rigid motion oracle away from the joins") {
  const Vec2 c{0.5, 0.5};
  const double omega = 0.5;
  RotatingStadiumFamily fam(c, 0.3, 0.12, omega, 1024);
  const Curve curve = fam.at(0, 0.25);
  const auto v = fd_velocity(fam, 0, 0.25);
  for (int i = 0; i < curve.size(); i += 61) {
    const Vec2 expected = omega * rot90(curve.pts[i] - c);
    CHECK((v[i] - expected).norm() < 1e-8);
  }
}

// ==== snake family =========================================================

TEST_CASE("snake: six congruent members, equal length, constant speed") {
  SnakeFamily fam;
  for (double t : {0.0, 0.5, 1.0}) {
    std::vector<double> lens;
    for (int m = 0; m < fam.members(); ++m) {
      const Curve c = fam.at(m, t);
      CHECK_FALSE(c.closed);
      const FrenetData fr = frenet(c);
      CHECK(check_constant_speed(fr, 1e-7));
      lens.push_back(c.geometric_length());
    }
    for (int m = 1; m < 6; ++m)
      CHECK(lens[m] == doctest::Approx(lens[0]).epsilon(1e-13));
    // Wiggle lengthens the band beyond the straight run.
    CHECK(lens[0] > 0.76);
  }
}

TEST_CASE("snake: pinned tube radius respects the focal and separation bounds") {
  SnakeFamily fam;
  // Focal bound: suggested radius (speed * min(1/(4 sup kappa), L/10)) must
  // exceed the pinned chart half-width at every time.
  const double suggested = suggest_tube_radius(fam, 5);
  CHECK(fam.tube_radius() <= suggested);
  // Band separation: geometric tube width + wiggle amplitude below half pitch.
  const Curve c = fam.at(0, 1.0);
  const double geo_halfwidth = fam.tube_radius() / c.param_speed;
  CHECK(fam.amplitude() + geo_halfwidth < 0.07);
  // Support box sits strictly inside the unit square.
  const auto box = fam.support();
  CHECK(box.x0 > 0.0);
  CHECK(box.x1 < 1.0);
  CHECK(box.y0 > 0.0);
  CHECK(box.y1 < 1.0);
  // And actually contains the extreme tube fibres.
  for (int m = 0; m < 6; ++m) {
    for (const Vec2& p : fam.at(m, 1.0).pts) {
      CHECK(p.x > box.x0 + geo_halfwidth * 0.99);
      CHECK(p.x < box.x1 - geo_halfwidth * 0.99);
      CHECK(p.y > box.y0 + geo_halfwidth * 0.99);
      CHECK(p.y < box.y1 - geo_halfwidth * 0.99);
    }
  }
}

TEST_CASE("snake: every member moves at every time") {
  SnakeFamily fam;
  for (double t : {0.0, 0.4, 1.0}) {
    for (int m = 0; m < 6; ++m) {
      const auto v = fd_velocity(fam, m, t);
      double vmax = 0.0;
      for (const Vec2& vi : v) vmax = std::max(vmax, vi.norm());
      CHECK(vmax > 1e-3);
    }
  }
}

// ==== perturbed wrapper ====================================================

TEST_CASE("perturbed family is deterministic and O(eps) close to its base") {
  auto base = std::make_shared<SnakeFamily>(384);
  const double eps = 1e-2;
  PerturbedFamily pa(base, fourier_slice_generator(eps, base->tube_radius(), 42),
                     false);
  PerturbedFamily pb(base, fourier_slice_generator(eps, base->tube_radius(), 42),
                     false);
  const Curve ca = pa.at(2, 0.3);
  const Curve cb = pb.at(2, 0.3);
  const Curve c0 = base->at(2, 0.3);
  double dist = 0.0;
  for (int i = 0; i < ca.size(); ++i) {
    CHECK(ca.pts[i].x == cb.pts[i].x);  // bit-identical across instances
    CHECK(ca.pts[i].y == cb.pts[i].y);
    dist = std::max(dist, (ca.pts[i] - c0.pts[i]).norm());
  }
  CHECK(dist > 0.0);
  CHECK(dist < 3.0 * eps * base->tube_radius());
}

TEST_CASE("constraint-enforced perturbed snake meets area and length budgets") {
  auto base = std::make_shared<SnakeFamily>(512);
  const double eps = 1e-3;
  PerturbedFamily fam(base, fourier_slice_generator(eps, base->tube_radius(), 7),
                      true);
  for (double t : {0.0, 0.37, 1.0}) {
    std::vector<double> lens;
    for (int m = 0; m < 6; ++m) {
      const Curve bc = base->at(m, t);
      const FrenetData fr = frenet(bc);
      const auto h = fam.slice(m, t);
      const double L = bc.geometric_length();
      CHECK(std::abs(area_difference(bc, fr, h)) < 1e-10 * L * L);
      lens.push_back(perturbed_length(bc, fr, h));
    }
    for (int m = 1; m < 6; ++m)
      CHECK(std::abs(lens[m] - lens[0]) < 1e-10 * lens[0]);
  }
}
