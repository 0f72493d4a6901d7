#pragma once
/// Pseudo-spectral advection--diffusion on the periodic unit square.
///
/// du/dt + v . grad u = mu Laplace u, integrated in the two-thirds
/// dealiased Fourier ball: diffusion by exact per-mode integrating factors,
/// advection by classical RK4 on the transformed equation, so the viscous
/// term imposes no step-size constraint. The advective term is assembled in
/// physical space (two inverse transforms for the gradient, one forward for
/// the product) and its zero mode is pinned to zero, which conserves the
/// scalar mean exactly. Steps are rejected up front when dt exceeds
/// 0.5 dx / sup|v| at the step's start, and the run aborts with a
/// diagnostic when a state stops being finite.

#include <functional>
#include <utility>
#include <vector>

#include "qss/grid_field.hpp"

namespace qss {

/// Time-dependent velocity sampled on demand at a grid's cell centres.
class VelocityField {
 public:
  virtual ~VelocityField() = default;
  /// Fill a two-component grid with v(x, t).
  virtual void sample(double t, GridField& v) const = 0;
};

/// Frozen velocity: every sample returns the same grid.
class StaticVelocity : public VelocityField {
 public:
  explicit StaticVelocity(GridField v);
  void sample(double t, GridField& v) const override;

 private:
  GridField v_;
};

/// Velocity given by a closed-form function of position and time.
class FunctionVelocity : public VelocityField {
 public:
  explicit FunctionVelocity(std::function<Vec2(Vec2, double)> f)
      : f_(std::move(f)) {}
  void sample(double t, GridField& v) const override;

 private:
  std::function<Vec2(Vec2, double)> f_;
};

/// One solved trajectory. The scalar series are recorded after every
/// accepted step (index 0 is the initial state); checkpoints, when
/// requested, are evenly spaced physical-space states including the final
/// one.
struct Trajectory {
  std::vector<double> times;
  std::vector<double> l2;             ///< ||theta|| at each recorded time
  std::vector<double> grad_sq;        ///< ||grad theta||^2 at each time
  double diffusion_integral = 0.0;    ///< integral of grad_sq over the span
  std::vector<double> checkpoint_times;
  std::vector<GridField> checkpoints;
  GridField final_state = GridField::scalar(2);
  int steps = 0;
};

/// Integrate from t_span.first to t_span.second with base step dt (the last
/// step shrinks to land on the endpoint). The initial state is projected
/// into the dealiased ball; `checkpoints` > 0 stores that many states.
/// Throws std::invalid_argument on CFL violation at the initial sample or a
/// sampled velocity that is not solenoidal; std::runtime_error on CFL
/// violation mid-run or a non-finite state.
Trajectory advect_diffuse(const VelocityField& v, const GridField& theta0,
                          double mu, std::pair<double, double> t_span,
                          double dt, int checkpoints = 0);

/// Pure transport: advect_diffuse with mu = 0.
Trajectory transport(const VelocityField& v, const GridField& rho0,
                     std::pair<double, double> t_span, double dt,
                     int checkpoints = 0);

/// Relative solenoidality defect of a sampled grid: ||div v|| over
/// 2 pi ||  |k| v^ ||, both spectral. Zero for exactly divergence-free
/// samples; the solver's precondition bound is 1e-6.
double divergence_defect(const GridField& v);

/// Leray--Helmholtz projection of a sampled vector grid: removes the
/// gradient part mode by mode and zeroes the Nyquist lines (whose signed
/// frequency is ambiguous, making them undifferentiable; they lie beyond
/// the dealiased ball in any case). The result has divergence defect at
/// roundoff. `removed` (optional) receives the L2 norm of the discarded
/// part. Pointwise samples of analytically divergence-free fields carry a
/// spurious spectral divergence from sampling aliasing, so velocity samples
/// are passed through this projection before time stepping.
GridField helmholtz_project(const GridField& v, double* removed = nullptr);

/// Velocity adapter that Helmholtz-projects every sample of an inner field.
/// `largest_removed` reports the biggest removed-part L2 norm seen, the
/// honesty figure for how far the sampled field was from solenoidal.
class ProjectedVelocity : public VelocityField {
 public:
  explicit ProjectedVelocity(const VelocityField& inner) : inner_(inner) {}
  void sample(double t, GridField& v) const override;
  double largest_removed() const { return removed_; }

 private:
  const VelocityField& inner_;
  mutable double removed_ = 0.0;
};

/// Quadrature of a sampled series: non-uniform Simpson over pairs of
/// intervals, with any odd final interval covered by the quadratic through
/// the last three points. Exposed for diagnostics that integrate recorded
/// norms.
double integrate_series(const std::vector<double>& times,
                        const std::vector<double>& values);

}  // namespace qss
