#pragma once
/// Building-block velocity and scalar fields carried by a family of moving
/// tubular charts.
///
/// Scalar: Theta(x) = scale * profile(Y(x)/r), where (S, Y) are the chart
/// coordinates of x, r is the chart half-width, and scale = 1/sqrt(L r)
/// turns the unit-Jacobian change of variables into a unit L2 norm over the
/// square. The profile is supported in |Y| <= r/2 and odd in Y, so the
/// scalar has exactly zero mean.
///
/// Velocity: inside the core |Y| <= 0.6 r the field is the motion field of
/// the chart family, d Phi/dt evaluated at the chart coordinates of x by
/// centred differences over charts at t - dt, t + dt. Published directly,
/// that field would end in a jump at the tube edge, so it is rolled off
/// through its stream function: with psi the chart-wise stream potential of
/// the motion field and w(Y) a flat C-infinity window (1 on |Y| <= 0.6 r,
/// 0 beyond 0.9 r), the published field is the rotated gradient of w psi,
///
///   V = w(Y) * dPhi/dt - w'(Y) * psi * dPhi/ds,
///
/// which is solenoidal by construction, agrees with the raw motion field on
/// the whole support of the scalar (so the transport identity is untouched),
/// and decays smoothly to zero inside the tube. The stream potential is
/// anchored on the curve (a cumulative integral along the axis) and extended
/// across fibres by Gauss-Legendre integration; its additive gauge is fixed
/// so the roll-off correction is mean-free over the blend annulus. Members
/// whose enclosed area drifts in time (only possible for unconstrained
/// families) get the fibre-mean drift removed to keep the potential
/// single-valued; the removed magnitude is reported.

#include <map>
#include <memory>
#include <vector>

#include "qss/curve_family.hpp"
#include "qss/cutoff.hpp"
#include "qss/grid.hpp"
#include "qss/tube_map.hpp"

namespace qss {

/// One member frozen at one time: charts at t and t +- dt plus the stream
/// table. Built and cached by LocalFieldSet.
class LocalField {
 public:
  /// Scalar value; exactly 0 outside the tube.
  double scalar(Vec2 x) const;
  /// Analytic scalar gradient via the chart chain rule; 0 outside.
  Vec2 scalar_gradient(Vec2 x) const;
  /// Tapered solenoidal motion field; exactly 0 for |Y| >= 0.9 r.
  Vec2 velocity(Vec2 x) const;

  /// Chart-coordinate evaluators used by the grid drivers (s in [0, L],
  /// y in (-r, r)).
  Vec2 velocity_chart(double s, double y) const;
  double scalar_chart(double y) const;
  double stream_chart(double s, double y) const;

  const TubeMap& chart() const { return *centre_; }
  double tube_radius() const { return r_; }
  /// Fibre-mean drift removed from the stream table (0 for area-preserving
  /// families up to the time-difference truncation).
  double removed_drift() const { return drift_; }

 private:
  friend class LocalFieldSet;
  LocalField() = default;

  /// Window w and derivative w' at chart offset y.
  void taper(double y, double& w, double& wprime) const;
  Vec2 raw_velocity_chart(double s, double y) const;

  std::shared_ptr<const TubeMap> minus_, centre_, plus_;
  CutoffProfile profile_;
  double dt_ = 0.0;
  double r_ = 0.0;
  double core_ = 0.0;   ///< 0.6 r: window is 1 inside
  double outer_ = 0.0;  ///< 0.9 r: window is 0 outside
  double scale_ = 0.0;  ///< 1/sqrt(L r)
  bool closed_ = false;

  std::vector<double> stream_axis_;  ///< stream potential on the axis y = 0
  double stream_ds_ = 0.0;           ///< table spacing in s
  double gauge_ = 0.0;               ///< subtracted additive constant
  double drift_ = 0.0;
  GaussRule fibre_rule_;             ///< Gauss-Legendre rule for the y-integral
};

/// Field family over all members of a curve family. Charts are cached per
/// (member, time) so evaluating at t and t +- dt shares work.
class LocalFieldSet {
 public:
  explicit LocalFieldSet(std::shared_ptr<const CurveFamily> family,
                         int cutoff_order = 6, double time_step = 1e-4);

  int members() const { return family_->members(); }
  double time_step() const { return dt_; }
  double tube_radius() const { return family_->tube_radius(); }
  const CutoffProfile& cutoff() const { return profile_; }
  const CurveFamily& family() const { return *family_; }

  /// Field bundle of one member at time t (cached).
  const LocalField& field(int member, double t) const;

  /// Sum over members (member tubes are disjoint by family design).
  double scalar(Vec2 x, double t) const;
  Vec2 velocity(Vec2 x, double t) const;

 private:
  std::shared_ptr<const TubeMap> chart(int member, double t) const;

  std::shared_ptr<const CurveFamily> family_;
  CutoffProfile profile_;
  double dt_;
  mutable std::map<std::pair<int, double>, std::shared_ptr<const TubeMap>>
      chart_cache_;
  mutable std::map<std::pair<int, double>, std::shared_ptr<const LocalField>>
      field_cache_;
};

struct FieldGrids {
  VectorGrid velocity;
  ScalarGrid scalar;
};

/// Samples both fields on the n x n torus grid; nodes outside every tube get
/// exact zeros.
FieldGrids evaluate_fields(const LocalFieldSet& set, int grid_n, double t);

struct TransportResidual {
  double sup_residual = 0.0;  ///< sup |dTheta/dt + V . grad Theta|
  double sup_gradient = 0.0;  ///< sup |grad Theta| on the same grid
  double sup_velocity = 0.0;
};

/// Transport defect on the grid: time derivative by centred differences over
/// the set's time step, gradient by centred grid differences, so the defect
/// shrinks with the spatial resolution.
TransportResidual transport_residual(const LocalFieldSet& set, int grid_n,
                                     double t);

/// Sup of a mesh-free 4th-order divergence probe of the velocity at in-tube
/// grid nodes; step = (smallest fibre half-width)/3000, far below the
/// roll-off layer width. The published field is solenoidal by construction,
/// so this measures implementation error rather than discretisation error.
double divergence_residual(const LocalFieldSet& set, int grid_n, double t);

struct FieldStabilityReport {
  double velocity_c0 = 0.0;
  double velocity_c1 = 0.0;  ///< full C1 norm: max of c0 and the sup of
                             ///< centred-difference first derivatives
  double scalar_c0 = 0.0;
  double scalar_c1 = 0.0;
};

/// Discrete C0/C1 distances of the assembled fields of two sets on a common
/// grid. Both fields vanish outside their tubes, so the comparison covers
/// the symmetric difference of the supports automatically.
FieldStabilityReport field_stability_report(const LocalFieldSet& a,
                                            const LocalFieldSet& b, int grid_n,
                                            double t);

}  // namespace qss
