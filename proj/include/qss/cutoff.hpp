#pragma once
/// Cross-fibre scalar template: one sine oscillation damped by a flat-ended
/// exponential bump,
///
///   profile(z) = c1 * sin(2 pi z) * exp(-1 / (1/4 - z^2))  for |z| < 1/2,
///   profile(z) = 0                                         otherwise,
///
/// with c1 chosen so the profile has unit L2 norm on [-1/2, 1/2]. The sine
/// factor makes the profile odd (exactly zero mean); the bump factor and all
/// of its derivatives vanish at +-1/2, so scalar fields built by composing
/// the profile with a chart coordinate extend by zero smoothly.

#include <vector>

namespace qss {

class CutoffProfile {
 public:
  /// profile(z); exactly 0 for |z| >= 1/2.
  double value(double z) const;

  /// Analytic derivative d profile / dz; exactly 0 for |z| >= 1/2.
  double derivative(double z) const;

  /// Unit-L2 scaling constant c1.
  double normaliser() const { return c1_; }

  /// Number of endpoint derivatives the caller may rely on vanishing.
  int order() const { return order_; }

 private:
  friend CutoffProfile build_cutoff(int smoothness_order);

  double c1_ = 0.0;
  int order_ = 0;
};

/// Computes the normalisation constant by composite Simpson quadrature and
/// returns the ready profile. The profile itself is smooth to all orders;
/// smoothness_order records the floor the caller relies on and must be >= 6
/// (throws std::invalid_argument otherwise).
CutoffProfile build_cutoff(int smoothness_order);

}  // namespace qss
