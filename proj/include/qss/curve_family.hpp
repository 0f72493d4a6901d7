#pragma once
/// Time-indexed families of constant-speed curves: rigid motions of circles
/// and stadiums (exact velocity oracles for tests), a six-band family of
/// congruent open "snake" curves filling the unit square, and a wrapper that
/// applies constraint-projected normal perturbations to any base family.
///
/// Conventions: every member keeps a time-independent parameter domain
/// [0, length] so charts built on different time slices share coordinates;
/// the parametrisation speed carries the (possibly time-dependent) geometric
/// length. Tube radii are quoted in chart units (geometric half-width times
/// parametrisation speed), which keeps the normal-offset solve well inside
/// its focal bound for every admissible chart point.

#include <functional>
#include <map>
#include <memory>
#include <string>

#include "qss/constraints.hpp"
#include "qss/curve.hpp"

namespace qss {

class CurveFamily {
 public:
  virtual ~CurveFamily() = default;
  virtual int members() const = 0;
  /// Sampled member curve at time t in [0, 1].
  virtual Curve at(int member, double t) const = 0;
  /// Chart half-width shared by all members and times.
  virtual double tube_radius() const = 0;
  virtual std::string name() const = 0;
  virtual int samples() const = 0;
};

/// Largest admissible chart half-width for the family, scanned over a few
/// time slices: min over t of speed * min(1/(4 sup|kappa|), 0.1 * geometric
/// length), times a safety factor.
double suggest_tube_radius(const CurveFamily& fam, int time_samples = 5,
                           double safety = 1.0);

// ---------------------------------------------------------------------------
// Rigid families (exact velocity oracles)
// ---------------------------------------------------------------------------

/// Circle spinning about its centre: the motion field is omega * (x-c)^perp.
class RotatingCircleFamily : public CurveFamily {
 public:
  RotatingCircleFamily(Vec2 centre, double radius, double omega, int samples,
                       int orientation = -1);
  int members() const override { return 1; }
  Curve at(int member, double t) const override;
  double tube_radius() const override;
  std::string name() const override { return "rotating-circle"; }
  int samples() const override { return samples_; }

  Vec2 centre() const { return centre_; }
  double omega() const { return omega_; }
  double radius() const { return radius_; }

 private:
  Vec2 centre_;
  double radius_, omega_;
  int samples_, orientation_;
};

/// Circle translating with constant velocity w.
class TranslatingCircleFamily : public CurveFamily {
 public:
  TranslatingCircleFamily(Vec2 centre0, double radius, Vec2 velocity, int samples,
                          int orientation = -1);
  int members() const override { return 1; }
  Curve at(int member, double t) const override;
  double tube_radius() const override;
  std::string name() const override { return "translating-circle"; }
  int samples() const override { return samples_; }

  Vec2 velocity() const { return velocity_; }

 private:
  Vec2 centre0_;
  double radius_;
  Vec2 velocity_;
  int samples_, orientation_;
};

/// Stadium spinning about its centre; only C^{1,1}, used as the
/// low-smoothness stress case.
class RotatingStadiumFamily : public CurveFamily {
 public:
  RotatingStadiumFamily(Vec2 centre, double straight, double radius, double omega,
                        int samples);
  int members() const override { return 1; }
  Curve at(int member, double t) const override;
  double tube_radius() const override;
  std::string name() const override { return "rotating-stadium"; }
  int samples() const override { return samples_; }

  Vec2 centre() const { return centre_; }
  double omega() const { return omega_; }

 private:
  Vec2 centre_;
  double straight_, radius_, omega_;
  int samples_;
};

// ---------------------------------------------------------------------------
// Snake family
// ---------------------------------------------------------------------------

/// Six congruent open curves in horizontal bands of the unit square. Each is
/// a straight run x in [0.12, 0.88] carrying a growing end-flat wiggle
/// A * (0.1 + 0.9 t) * (4u(1-u))^6 * sin(2 pi k u), mirrored in alternate
/// bands (rigid reflections keep the members congruent, hence automatically
/// equal length with equal enclosed band area). The wiggle never vanishes and
/// deepens at a constant rate, so the motion field never degenerates.
class SnakeFamily : public CurveFamily {
 public:
  explicit SnakeFamily(int samples = 768, double amplitude = 0.035,
                       int wiggles = 2);
  int members() const override { return 6; }
  Curve at(int member, double t) const override;
  double tube_radius() const override { return tube_radius_; }
  std::string name() const override { return "snake"; }
  int samples() const override { return samples_; }

  /// Axis-aligned compact region containing every tube of the family.
  struct Box { double x0, x1, y0, y1; };
  Box support() const;

  double band_centre(int member) const { return 0.15 + 0.14 * member; }
  double band_sign(int member) const { return member % 2 == 0 ? 1.0 : -1.0; }
  double amplitude() const { return amplitude_; }

 private:
  int samples_, wiggles_;
  double amplitude_, tube_radius_;
};

// ---------------------------------------------------------------------------
// Perturbed wrapper
// ---------------------------------------------------------------------------

/// Raw (unprojected) perturbation slice for one member at one time.
using SliceGenerator = std::function<std::vector<double>(
    int member, double t, const Curve& base, const FrenetData& fr)>;

/// Smooth random Fourier profiles with a fixed seed: amplitude eps * scale,
/// end-flat window on open curves, smoothly time-modulated per member.
SliceGenerator fourier_slice_generator(double eps, double scale,
                                       std::uint64_t seed, int max_harmonic = 4);

/// Applies generated slices to a base family; optionally projects every time
/// slice onto the admissible set (exact per-curve area preservation, equal
/// geometric length across members). Projection results are cached per time.
class PerturbedFamily : public CurveFamily {
 public:
  PerturbedFamily(std::shared_ptr<const CurveFamily> base, SliceGenerator gen,
                  bool enforce_constraints);
  int members() const override { return base_->members(); }
  Curve at(int member, double t) const override;
  double tube_radius() const override { return base_->tube_radius(); }
  std::string name() const override { return base_->name() + "-perturbed"; }
  int samples() const override { return base_->samples(); }

  /// The slice actually applied at (member, t) after any projection.
  std::vector<double> slice(int member, double t) const;
  const CurveFamily& base() const { return *base_; }

 private:
  struct TimeSlice {
    std::vector<std::vector<double>> h;
    bool converged = true;
  };
  const TimeSlice& slices_at(double t) const;

  std::shared_ptr<const CurveFamily> base_;
  SliceGenerator gen_;
  bool enforce_;
  mutable std::map<double, TimeSlice> cache_;
};

}  // namespace qss
