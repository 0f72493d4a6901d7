#pragma once
/// Normal perturbations gamma_tilde = gamma + h eta of sampled curves:
/// stretch, frame and curvature response (exact and first-order), enclosed
/// area change, and length functionals.

#include <span>

#include "qss/curve.hpp"

namespace qss {

/// Node-wise comparison data for a normal perturbation.
struct PerturbationAnalysis {
  /// |gamma_tilde'| / |gamma'|: recomputed from the offset samples by finite
  /// differences (reference), from the closed-form expression
  /// sqrt((1-h kappa)^2 + (h'/l)^2), and to first order 1 - h kappa.
  std::vector<double> stretch_fd;
  std::vector<double> stretch_closed_form;
  std::vector<double> stretch_first_order;

  /// Unit tangents: recomputed, and the first-order model tau + (h'/l) eta.
  std::vector<Vec2> tau_fd;
  std::vector<Vec2> tau_first_order;

  /// Curvature: recomputed, closed form from the base frame and h, and the
  /// first-order model kappa + kappa^2 h + h''/l^2.
  std::vector<double> kappa_fd;
  std::vector<double> kappa_closed_form;
  std::vector<double> kappa_first_order;
};

PerturbationAnalysis analyse_perturbation(const Curve& curve, const FrenetData& fr,
                                          std::span<const double> h);

/// Change of enclosed area under gamma -> gamma + h eta, computed by exact
/// quadrature of the offset identity (no small-h truncation):
///   delta A_signed = -int h dsigma + 1/2 int h^2 kappa dsigma,  dsigma = |gamma'| ds.
/// For closed curves the result is converted to enclosed (unsigned-orientation)
/// area change; for open curves h must vanish at the ends and the result is the
/// signed area of the circuit gamma -> reversed gamma_tilde (the area swept to
/// the right of the curve counts positive).
double area_difference(const Curve& curve, const FrenetData& fr,
                       std::span<const double> h);

/// Exact length of the perturbed curve: int sqrt(l^2 (1-h kappa)^2 + h'^2) ds.
double perturbed_length(const Curve& curve, const FrenetData& fr,
                        std::span<const double> h);

/// First variation of length: -int kappa h dsigma.
double length_first_variation(const Curve& curve, const FrenetData& fr,
                              std::span<const double> h);

}  // namespace qss
