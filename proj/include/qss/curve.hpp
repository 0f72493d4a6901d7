#pragma once
/// Sampled plane curves and their Frenet data.
///
/// Orientation convention used throughout the library: the normal is the
/// tangent rotated left by 90 degrees (eta = J tau with J(a,b) = (-b,a)), the
/// curvature is kappa = det(gamma', gamma'') / |gamma'|^3, and the frame
/// satisfies d tau/ds = l kappa eta, d eta/ds = -l kappa tau, det(tau, eta) = +1.
/// A counter-clockwise circle has kappa = +1/R with eta pointing inward; a
/// clockwise circle has kappa = -1/R with eta pointing outward.

#include <functional>
#include <optional>
#include <vector>

#include "qss/numerics.hpp"

namespace qss {

/// A uniformly sampled constant-speed curve. Closed curves store one period
/// (sample M would coincide with sample 0); open curves store both endpoints.
/// The parameter s runs over [0, L) resp. [0, L], so the node spacing is
/// L/M (closed) or L/(M-1) (open). param_speed is |dgamma/ds|, constant for
/// curves produced by the factories; perturbed curves keep the nominal value
/// of their base curve (their true speed varies, which downstream code
/// handles via per-node speeds).
struct Curve {
  std::vector<Vec2> pts;
  double length = 1.0;       ///< parameter-domain length L
  double param_speed = 1.0;  ///< nominal |gamma'|
  bool closed = true;
  double time = 0.0;         ///< time label for members of a family

  int size() const { return int(pts.size()); }
  double ds() const { return closed ? length / size() : length / (size() - 1); }
  /// Geometric length = param_speed * L for constant-speed curves.
  double geometric_length() const { return param_speed * length; }
};

/// Frenet data sampled at the curve nodes.
struct FrenetData {
  std::vector<Vec2> tau;          ///< unit tangents
  std::vector<Vec2> eta;          ///< unit normals (tau rotated left)
  std::vector<double> kappa;      ///< signed curvature
  std::vector<double> kappa_s;    ///< d kappa / ds (parameter derivative)
  std::vector<double> speed;      ///< per-node |gamma'(s)|
  double mean_speed = 1.0;
  double max_speed_deviation = 0.0;  ///< max |speed - mean| / mean
};

/// Compute Frenet data by high-order finite differences of the samples.
FrenetData frenet(const Curve& curve);

/// Verify the constant-speed invariant: relative speed deviation <= tol.
bool check_constant_speed(const FrenetData& fr, double tol = 1e-6);

/// gamma + h eta applied node-wise. The perturbation h is sampled on the
/// curve's grid; for open curves callers should supply h vanishing to high
/// order at the ends. The result keeps the base curve's metadata.
Curve offset_curve(const Curve& curve, const FrenetData& fr,
                   std::span<const double> h);

/// Signed polygon (shoelace) area of the closed polygon through the samples;
/// for open curves, of the polygon closed by a straight chord.
double polygon_area(const Curve& curve);

// ---------------------------------------------------------------------------
// Factories (all constant-speed by construction)
// ---------------------------------------------------------------------------

/// Circle of radius R centred at c. orientation=+1 is counter-clockwise,
/// -1 clockwise. param_length is the parameter-domain length L (the sampling
/// uses constant speed 2 pi R / L); by default L equals the circumference so
/// the curve is arclength-parametrised.
Curve make_circle(Vec2 centre, double radius, int orientation, int samples,
                  std::optional<double> param_length = std::nullopt);

/// Open straight segment from a to b, arclength-parametrised by default.
Curve make_segment(Vec2 a, Vec2 b, int samples,
                   std::optional<double> param_length = std::nullopt);

/// Stadium (two half-circles of radius R joined by straights of length a),
/// clockwise, arclength-parametrised. C^{1,1} only: curvature jumps at the
/// joins, useful as a low-smoothness stress case.
Curve make_stadium(Vec2 centre, double straight, double radius, int samples);

/// Arclength reparametrisation of an analytic shape P(u), u in [0,1], with
/// derivative dP(u). Returns samples at equal arclength increments; the
/// parameter domain is [0, L_param] with L_param = 1 and param_speed = total
/// geometric length, so families built from shapes keep a fixed parameter
/// domain while their length changes over time.
Curve reparametrise_by_arclength(const std::function<Vec2(double)>& P,
                                 const std::function<Vec2(double)>& dP,
                                 int samples, bool closed,
                                 int fine_factor = 16);

}  // namespace qss
