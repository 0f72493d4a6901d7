#pragma once
/// Area-preserving tubular chart around a sampled curve:
///
///   Phi(s, y) = gamma(s) + b(s, y) * eta(s),
///
/// where for each fibre the normal offset b solves the quadratic
/// b - (kappa/2) b^2 = y / speed with b(s, 0) = 0 and speed = |d gamma / ds|
/// taken at the local node, so the chart pushes Lebesgue measure of the
/// (s, y) strip to Lebesgue measure of the tube exactly: the column along s
/// is speed (1 - kappa b) tau plus an eta-component, the column along y is
/// eta / (speed (1 - kappa b)), hence det = det(tau, eta) = 1 for any
/// parametrisation, constant-speed or not.
///
/// The chart coordinate y lives in (-r, r); geometric offsets are b ~ y/speed,
/// so r is quoted in "chart units" (geometric half-width times speed).
/// Inversion runs Newton with analytic Jacobians, seeded from a precomputed
/// image grid addressed through a uniform spatial hash.

#include <optional>
#include <vector>

#include "qss/curve.hpp"

namespace qss {

/// Closed-form normal offset: the branch through 0 of
/// b - (kappa/2) b^2 = y/speed, i.e. (1 - sqrt(1 - 2 kappa y/speed))/kappa,
/// switching to the series y/speed + kappa (y/speed)^2/2 for |kappa| < 1e-8
/// where the quotient degenerates to 0/0.
/// Throws std::invalid_argument when the discriminant is non-positive (the
/// fibre reaches past the focal distance: tube too wide).
double normal_offset(double kappa, double y, double speed);

/// dB/dy = 1 / (speed (1 - kappa b)).
double normal_offset_dy(double kappa, double b, double speed);

/// Result of the contraction iteration for the perturbed normal offset.
struct OffsetFixedPoint {
  std::vector<double> beta;  ///< perturbed offsets, one per node
  int iterations = 0;        ///< sweeps until the update stalled
  bool converged = true;     ///< false when 100 sweeps were not enough
};

/// Solves the perturbed offset equation b' - (kappa'/2) b'^2 = y/speed' as a
/// fixed point in the correction d = b' - b:
///
///   d <- [ b^2 (kappa'-kappa)/2 + y (1/speed' - 1/speed) + Q/2 ] / (1 - kappa b),
///   Q  = 2 b d (kappa'-kappa) + kappa d^2 + (kappa'-kappa) d^2,
///
/// a contraction whenever the perturbation is small and 1 - kappa b is
/// bounded below. The fixed point matches normal_offset(kappa', y, speed');
/// the iteration count is reported so tests can observe geometric decay.
OffsetFixedPoint perturbed_offset_fixed_point(const std::vector<double>& kappa_pert,
                                              const std::vector<double>& kappa_base,
                                              const std::vector<double>& beta_base,
                                              const std::vector<double>& speed_pert,
                                              const std::vector<double>& speed_base,
                                              double y);

/// Chart coordinates of a point: arc parameter s in [0, L], fibre offset y.
struct ChartPoint {
  double s = 0.0;
  double y = 0.0;
};

class TubeMap {
 public:
  /// Newton settings for inversion.
  static constexpr int kMaxNewtonIterations = 30;
  static constexpr double kNewtonTolerance = 1e-12;

  const Curve& curve() const { return curve_; }
  const FrenetData& frenet() const { return fr_; }
  double tube_radius() const { return r_; }

  /// Chart image Phi(s, y); node data is interpolated with 8-point Lagrange
  /// windows along s, analytic in y.
  Vec2 map(double s, double y) const;

  /// Analytic Jacobian, columns (d Phi/ds, d Phi/dy).
  Mat2 jacobian(double s, double y) const;

  /// Normal offset b(s, y) of the chart fibre.
  double offset(double s, double y) const;

  /// Inverts the chart at x: Newton from the nearest seed-grid image.
  /// Returns the chart point when x lies in the open tube |y| < r, and
  /// nothing when x is outside. Newton failure next to the curve itself
  /// (which a valid map never produces) throws std::runtime_error.
  std::optional<ChartPoint> invert(Vec2 x) const;

  /// Same root search, but keeps converged points slightly beyond the tube
  /// edge (|y| <= 1.2 r) instead of reporting them as outside; used when
  /// measuring distances from points just off the tube.
  std::optional<ChartPoint> invert_extended(Vec2 x) const;

  /// Cheap reject: true when x lies inside the inflated bounding box of the
  /// tube image. invert() of any point failing this test returns nullopt, so
  /// callers evaluating fields on large grids can skip the Newton machinery.
  bool near_tube(Vec2 x) const {
    return x.x >= bb_lo_.x && x.x <= bb_hi_.x && x.y >= bb_lo_.y &&
           x.y <= bb_hi_.y;
  }

  /// Smallest geometric fibre half-width over the nodes; sets the scale of
  /// "safely inside" for probes near the tube.
  double min_halfwidth() const { return min_halfwidth_; }

 private:
  friend TubeMap build_tube_map(const Curve& curve, const FrenetData& fr,
                                double tube_radius);

  bool newton_from(Vec2 x, ChartPoint seed, ChartPoint& root,
                   bool& pinned_at_end) const;
  std::optional<ChartPoint> root_near(Vec2 x) const;

  Curve curve_;
  FrenetData fr_;
  double r_ = 0.0;

  // Structure-of-arrays node data for interpolation.
  std::vector<double> px_, py_, tx_, ty_, ex_, ey_;
  std::vector<double> kappa_, kappa_s_, speed_, speed_s_;

  // Seed grid for Newton and its spatial hash.
  std::vector<Vec2> seed_pts_;
  std::vector<ChartPoint> seed_params_;
  Vec2 bb_lo_{0, 0}, bb_hi_{0, 0};
  double cell_ = 0.0;
  int ncx_ = 0, ncy_ = 0;
  std::vector<std::vector<int>> buckets_;
  double min_halfwidth_ = 0.0;  ///< smallest geometric fibre half-width
};

/// Validates the focal margin (discriminant >= 1/4 at y = +-r on every node,
/// keeping 1 - kappa b >= 1/2) and assembles the chart with its seed grid.
/// Works identically for constant-speed base curves and variable-speed
/// perturbed curves: the per-node speed comes from the Frenet data.
TubeMap build_tube_map(const Curve& curve, const FrenetData& fr,
                       double tube_radius);

/// Sup-norm distances between two charts sharing one (s, y) strip.
struct MapStabilityReport {
  double c0 = 0.0;         ///< sup |Phi' - Phi|
  double c1 = 0.0;         ///< sup of first finite-difference derivatives
  double c2 = 0.0;         ///< sup of second finite-difference derivatives
  double inv_c0 = 0.0;     ///< sup |Psi'(Phi(s,y)) - (s,y)| over the overlap
  double inv_c1 = 0.0;     ///< sup of its first finite differences
  double hausdorff = 0.0;  ///< two-sided Hausdorff distance of the tube images
};

/// Samples both charts on an ns x ny strip grid (fibres strictly interior),
/// differences the images and their finite-difference derivatives, measures
/// the inverse distance in chart coordinates on the overlap of the tubes, and
/// estimates the Hausdorff distance of the images from boundary samples
/// (points of one boundary inside the other tube contribute zero; points
/// outside contribute their distance to the clamped chart projection).
MapStabilityReport map_stability_report(const TubeMap& base, const TubeMap& pert,
                                        int ns = 256, int ny = 64);

}  // namespace qss
