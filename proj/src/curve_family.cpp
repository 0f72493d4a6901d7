#include "qss/curve_family.hpp"

#include <cmath>
#include <limits>
#include <numbers>

namespace qss {

namespace {
constexpr double kPi = std::numbers::pi;

Curve rotate_about(const Curve& base, Vec2 centre, double angle) {
  Curve out = base;
  const double c = std::cos(angle), s = std::sin(angle);
  for (auto& p : out.pts) {
    const Vec2 d = p - centre;
    p = centre + Vec2{c * d.x - s * d.y, s * d.x + c * d.y};
  }
  return out;
}
}  // namespace

double suggest_tube_radius(const CurveFamily& fam, int time_samples, double safety) {
  double r = std::numeric_limits<double>::infinity();
  for (int m = 0; m < fam.members(); ++m) {
    for (int it = 0; it < time_samples; ++it) {
      const double t = double(it) / (time_samples - 1);
      const Curve c = fam.at(m, t);
      const FrenetData fr = frenet(c);
      double kmax = 0.0;
      for (double k : fr.kappa) kmax = std::max(kmax, std::abs(k));
      const double geo = std::min(kmax > 0 ? 1.0 / (4.0 * kmax)
                                           : std::numeric_limits<double>::infinity(),
                                  0.1 * c.geometric_length());
      r = std::min(r, fr.mean_speed * geo);
    }
  }
  return safety * r;
}

// ---- rigid families -------------------------------------------------------

RotatingCircleFamily::RotatingCircleFamily(Vec2 centre, double radius, double omega,
                                           int samples, int orientation)
    : centre_(centre), radius_(radius), omega_(omega), samples_(samples),
      orientation_(orientation) {}

Curve RotatingCircleFamily::at(int, double t) const {
  Curve base = make_circle(centre_, radius_, orientation_, samples_);
  Curve out = rotate_about(base, centre_, omega_ * t);
  out.time = t;
  return out;
}

double RotatingCircleFamily::tube_radius() const {
  // Arclength-parametrised circle: chart and geometric radii agree.
  return std::min(radius_ / 4.0, 0.1 * 2.0 * kPi * radius_);
}

TranslatingCircleFamily::TranslatingCircleFamily(Vec2 centre0, double radius,
                                                 Vec2 velocity, int samples,
                                                 int orientation)
    : centre0_(centre0), radius_(radius), velocity_(velocity), samples_(samples),
      orientation_(orientation) {}

Curve TranslatingCircleFamily::at(int, double t) const {
  Curve out = make_circle(centre0_ + t * velocity_, radius_, orientation_, samples_);
  out.time = t;
  return out;
}

double TranslatingCircleFamily::tube_radius() const {
  return std::min(radius_ / 4.0, 0.1 * 2.0 * kPi * radius_);
}

RotatingStadiumFamily::RotatingStadiumFamily(Vec2 centre, double straight,
                                             double radius, double omega, int samples)
    : centre_(centre), straight_(straight), radius_(radius), omega_(omega),
      samples_(samples) {}

Curve RotatingStadiumFamily::at(int, double t) const {
  Curve base = make_stadium(centre_, straight_, radius_, samples_);
  Curve out = rotate_about(base, centre_, omega_ * t);
  out.time = t;
  return out;
}

double RotatingStadiumFamily::tube_radius() const {
  const double L = 2.0 * straight_ + 2.0 * kPi * radius_;
  return std::min(radius_ / 4.0, 0.1 * L);
}

// ---- snake family ---------------------------------------------------------

SnakeFamily::SnakeFamily(int samples, double amplitude, int wiggles)
    : samples_(samples), wiggles_(wiggles), amplitude_(amplitude) {
  // Chart half-width: geometric bound keeping neighbouring bands separated
  // (band pitch 0.14, wiggle amplitude A, geometric tube width r/l), times
  // the minimal parametrisation speed over the sweep; 0.016 satisfies both
  // the separation and the focal bound for A = 0.035 (verified in tests).
  tube_radius_ = 0.016;
}

Curve SnakeFamily::at(int member, double t) const {
  const double yc = band_centre(member);
  const double sgn = band_sign(member);
  // Wiggle depth grows affinely but never vanishes: curvature stays bounded
  // away from zero at every time, which keeps the equal-length kernel
  // direction first-order effective along the whole sweep.
  const double A = amplitude_ * (0.1 + 0.9 * t) * sgn;
  const int k = wiggles_;
  auto P = [&](double u) {
    const double E = std::pow(4.0 * u * (1.0 - u), 6);
    return Vec2{0.12 + 0.76 * u, yc + A * E * std::sin(2.0 * kPi * k * u)};
  };
  auto dP = [&](double u) {
    const double B = 4.0 * u * (1.0 - u);
    const double E = std::pow(B, 6);
    const double dE = 6.0 * std::pow(B, 5) * 4.0 * (1.0 - 2.0 * u);
    return Vec2{0.76, A * (dE * std::sin(2.0 * kPi * k * u) +
                           E * 2.0 * kPi * k * std::cos(2.0 * kPi * k * u))};
  };
  Curve c = reparametrise_by_arclength(P, dP, samples_, false);
  c.time = t;
  return c;
}

SnakeFamily::Box SnakeFamily::support() const {
  // Tube geometric half-width <= r / min speed; min speed ~ 0.76.
  const double w = tube_radius_ / 0.76;
  return {0.12 - w - 0.005, 0.88 + w + 0.005,
          band_centre(0) - amplitude_ - w - 0.005,
          band_centre(5) + amplitude_ + w + 0.005};
}

// ---- perturbed wrapper ----------------------------------------------------

SliceGenerator fourier_slice_generator(double eps, double scale, std::uint64_t seed,
                                       int max_harmonic) {
  return [=](int member, double t, const Curve& base, const FrenetData&) {
    // Coefficients depend deterministically on (seed, member) only; time
    // enters through a smooth modulation so slices vary along the sweep.
    Rng rng(seed + 0x9e37ULL * std::uint64_t(member + 1));
    const int n = base.size();
    std::vector<double> u(n, 0.0);
    for (int m = 1; m <= max_harmonic; ++m) {
      const double a = rng.uniform(-1.0, 1.0);
      const double b = rng.uniform(-1.0, 1.0);
      const double phase = rng.uniform(0.0, 2.0 * kPi);
      const double mod = 0.6 + 0.4 * std::cos(2.0 * kPi * t + phase);
      for (int i = 0; i < n; ++i) {
        const double s = double(i) / (base.closed ? n : n - 1);
        u[i] += mod * (a * std::cos(2.0 * kPi * m * s) + b * std::sin(2.0 * kPi * m * s));
      }
    }
    const double amp = eps * scale;
    for (int i = 0; i < n; ++i) {
      double w = 1.0;
      if (!base.closed) {
        const double s = double(i) / (n - 1);
        w = std::pow(4.0 * s * (1.0 - s), 6);
      }
      u[i] *= amp * w;
    }
    return u;
  };
}

PerturbedFamily::PerturbedFamily(std::shared_ptr<const CurveFamily> base,
                                 SliceGenerator gen, bool enforce_constraints)
    : base_(std::move(base)), gen_(std::move(gen)), enforce_(enforce_constraints) {}

const PerturbedFamily::TimeSlice& PerturbedFamily::slices_at(double t) const {
  auto it = cache_.find(t);
  if (it != cache_.end()) return it->second;

  TimeSlice ts;
  const int N = base_->members();
  std::vector<Curve> curves;
  std::vector<FrenetData> frs;
  std::vector<std::vector<double>> raw;
  curves.reserve(N);
  for (int m = 0; m < N; ++m) {
    curves.push_back(base_->at(m, t));
    frs.push_back(frenet(curves.back()));
    raw.push_back(gen_(m, t, curves.back(), frs.back()));
  }
  if (enforce_) {
    FamilyProjection fp = project_equal_length(curves, frs, raw);
    ts.h = std::move(fp.h);
    ts.converged = fp.converged;
  } else {
    ts.h = std::move(raw);
  }
  if (cache_.size() > 4096) cache_.clear();
  return cache_.emplace(t, std::move(ts)).first->second;
}

Curve PerturbedFamily::at(int member, double t) const {
  Curve base = base_->at(member, t);
  FrenetData fr = frenet(base);
  const TimeSlice& ts = slices_at(t);
  Curve out = offset_curve(base, fr, ts.h[member]);
  out.time = t;
  return out;
}

std::vector<double> PerturbedFamily::slice(int member, double t) const {
  return slices_at(t).h[member];
}

}  // namespace qss
