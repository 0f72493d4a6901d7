#pragma once
/// Constraint projections for families of perturbation slices: exact area
/// preservation per curve (1-D Newton on a basis-bump multiplier) and equal
/// geometric length across a family (independent bracketed root finds on
/// per-curve kernel coefficients, with area re-projected inside every length
/// evaluation).

#include <span>
#include <vector>

#include "qss/curve.hpp"
#include "qss/perturbation.hpp"

namespace qss {

/// Shape added with multiplier alpha to restore the enclosed area:
/// normalised so that int phi0 dsigma = 1. Closed curves use a constant;
/// open curves a (u(1-u))^7 bump, vanishing to high order at the ends.
std::vector<double> make_area_basis(const Curve& curve, const FrenetData& fr);

/// Kernel direction used to adjust a curve's length without disturbing the
/// area constraint (area is re-projected anyway): a zero-mean, end-flat
/// profile with generically nonzero length response. Closed curves use a
/// second harmonic (robust on constant-curvature curves, where the length
/// response is second order); open curves a windowed, mean-free curvature
/// profile.
std::vector<double> make_length_kernel(const Curve& curve, const FrenetData& fr);

struct AreaProjection {
  std::vector<double> h;   ///< u + alpha * phi0
  double alpha = 0.0;
  double residual = 0.0;   ///< area_difference at the returned h
  int iterations = 0;
  bool converged = false;
};

/// Find alpha such that area_difference(curve, fr, u + alpha*phi0) = 0.
/// The residual is exactly quadratic in alpha, so Newton from 0 converges in
/// a handful of steps to round-off; tol is an absolute bound on |residual|.
AreaProjection project_area_preserving(const Curve& curve, const FrenetData& fr,
                                       std::span<const double> u,
                                       std::span<const double> phi0,
                                       double tol = 1e-13);

struct FamilyProjection {
  std::vector<std::vector<double>> h;  ///< final slices, one per curve
  std::vector<double> alpha;           ///< area multipliers
  std::vector<double> kernel_coeff;    ///< length coefficients (entry 0 is 0)
  std::vector<double> length_defects;  ///< L_i - L_0 at the solution, i >= 1
  double max_area_defect = 0.0;
  int length_evaluations = 0;
  bool converged = false;
};

struct FamilyProjectionOptions {
  double area_tol = 1e-13;    ///< absolute |area defect| bound per curve
  double length_tol = 1e-12;  ///< absolute |length defect| bound per pair
  int max_evals_per_curve = 200;
};

/// Project a family of raw slices u_i so that every curve preserves its
/// enclosed area exactly and all perturbed curves share the geometric length
/// of curve 0 (the reference, which gets only the area projection). Curve
/// i >= 1 additionally receives c_i * kernel_i; each c_i is solved
/// independently by bracketed root finding on the length defect.
///
/// Reachability caveat: on constant-curvature (circular) curves every
/// admissible area-preserving perturbation lengthens the curve, so a
/// reference *shorter* than a perturbed member cannot be matched; the result
/// then reports converged = false with the best coefficient found.
FamilyProjection project_equal_length(std::span<const Curve> curves,
                                      std::span<const FrenetData> frenets,
                                      const std::vector<std::vector<double>>& u,
                                      const FamilyProjectionOptions& opts = {});

}  // namespace qss
