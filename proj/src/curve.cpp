#include "qss/curve.hpp"

#include <cmath>
#include <numbers>

namespace qss {

namespace {
constexpr double kPi = std::numbers::pi;
}

FrenetData frenet(const Curve& curve) {
  const int n = curve.size();
  const double ds = curve.ds();
  FiniteDiff fd(n, ds, curve.closed);

  std::vector<double> x(n), y(n);
  for (int i = 0; i < n; ++i) {
    x[i] = curve.pts[i].x;
    y[i] = curve.pts[i].y;
  }
  const auto xp = fd.derivative(x, 1);
  const auto yp = fd.derivative(y, 1);
  const auto xpp = fd.derivative(x, 2);
  const auto ypp = fd.derivative(y, 2);

  FrenetData fr;
  fr.tau.resize(n);
  fr.eta.resize(n);
  fr.kappa.resize(n);
  fr.speed.resize(n);
  double sum = 0.0;
  for (int i = 0; i < n; ++i) {
    const Vec2 g1{xp[i], yp[i]};
    const double sp = g1.norm();
    fr.speed[i] = sp;
    sum += sp;
    fr.tau[i] = g1 / sp;
    fr.eta[i] = rot90(fr.tau[i]);
    fr.kappa[i] = (xp[i] * ypp[i] - yp[i] * xpp[i]) / (sp * sp * sp);
  }
  fr.mean_speed = sum / n;
  double dev = 0.0;
  for (int i = 0; i < n; ++i)
    dev = std::max(dev, std::abs(fr.speed[i] - fr.mean_speed));
  fr.max_speed_deviation = dev / fr.mean_speed;
  fr.kappa_s = fd.derivative(fr.kappa, 1);
  return fr;
}

bool check_constant_speed(const FrenetData& fr, double tol) {
  return fr.max_speed_deviation <= tol;
}

Curve offset_curve(const Curve& curve, const FrenetData& fr,
                   std::span<const double> h) {
  Curve out = curve;
  for (int i = 0; i < curve.size(); ++i) out.pts[i] += h[i] * fr.eta[i];
  return out;
}

double polygon_area(const Curve& curve) {
  double acc = 0.0;
  const int n = curve.size();
  for (int i = 0; i < n; ++i) {
    const Vec2 a = curve.pts[i];
    const Vec2 b = curve.pts[(i + 1) % n];
    acc += cross(a, b);
  }
  return 0.5 * acc;
}

Curve make_circle(Vec2 centre, double radius, int orientation, int samples,
                  std::optional<double> param_length) {
  Curve c;
  c.closed = true;
  c.length = param_length.value_or(2.0 * kPi * radius);
  c.param_speed = 2.0 * kPi * radius / c.length;
  c.pts.resize(samples);
  for (int i = 0; i < samples; ++i) {
    const double th = orientation * 2.0 * kPi * i / samples;
    c.pts[i] = centre + Vec2{radius * std::cos(th), radius * std::sin(th)};
  }
  return c;
}

Curve make_segment(Vec2 a, Vec2 b, int samples, std::optional<double> param_length) {
  Curve c;
  c.closed = false;
  const double geo = (b - a).norm();
  c.length = param_length.value_or(geo);
  c.param_speed = geo / c.length;
  c.pts.resize(samples);
  for (int i = 0; i < samples; ++i) {
    const double u = double(i) / (samples - 1);
    c.pts[i] = a + u * (b - a);
  }
  return c;
}

Curve make_stadium(Vec2 centre, double straight, double radius, int samples) {
  const double a = straight, R = radius;
  const double L = 2.0 * a + 2.0 * kPi * R;
  Curve c;
  c.closed = true;
  c.length = L;
  c.param_speed = 1.0;
  c.pts.resize(samples);
  // Clockwise: top straight right-to-left ... assembled from four pieces,
  // arclength sigma in [0, L).
  for (int i = 0; i < samples; ++i) {
    const double s = L * i / samples;
    Vec2 p;
    if (s < a) {  // top straight, moving -x
      p = {a / 2 - s, R};
    } else if (s < a + kPi * R) {  // left cap
      const double ph = (s - a) / R;  // 0..pi
      p = {-a / 2 - R * std::sin(ph), R * std::cos(ph)};
    } else if (s < 2 * a + kPi * R) {  // bottom straight, moving +x
      const double u = s - a - kPi * R;
      p = {-a / 2 + u, -R};
    } else {  // right cap
      const double ph = (s - 2 * a - kPi * R) / R;  // 0..pi
      p = {a / 2 + R * std::sin(ph), -R * std::cos(ph)};
    }
    c.pts[i] = centre + p;
  }
  return c;
}

Curve reparametrise_by_arclength(const std::function<Vec2(double)>& P,
                                 const std::function<Vec2(double)>& dP,
                                 int samples, bool closed, int fine_factor) {
  // Cumulative arclength on a fine grid, then Newton inversion per target.
  const int nf = fine_factor * samples + 1;
  const double du = 1.0 / (nf - 1);
  std::vector<double> speed(nf);
  for (int i = 0; i < nf; ++i) speed[i] = dP(i * du).norm();
  const auto sigma = cumulative_integral(speed, du);
  const double total = sigma.back();

  Curve c;
  c.closed = closed;
  c.length = 1.0;  // fixed parameter domain [0,1]
  c.param_speed = total;
  c.pts.resize(samples);
  const int nseg = closed ? samples : samples - 1;
  int lo = 0;
  for (int i = 0; i < samples; ++i) {
    const double target = total * i / nseg;
    // Bracket from the table (sigma is increasing), then Newton.
    while (lo + 1 < nf && sigma[lo + 1] < target) ++lo;
    double u = (lo + 0.5) * du;
    for (int it = 0; it < 60; ++it) {
      // Interpolate sigma(u) from the table with local correction.
      const double f = interp8(sigma, u / du, false) - target;
      const double g = dP(u).norm();
      const double step = f / g;
      u -= step;
      u = std::clamp(u, 0.0, 1.0);
      if (std::abs(step) < 1e-15) break;
    }
    c.pts[i] = P(u);
  }
  return c;
}

}  // namespace qss
