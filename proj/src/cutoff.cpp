#include "qss/cutoff.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "qss/numerics.hpp"

namespace qss {

namespace {

/// Flat-ended bump exp(-1/(1/4 - z^2)) on (-1/2, 1/2), zero outside. The
/// exponent runs to -infinity at the endpoints, so the value underflows to
/// zero well before |z| reaches 1/2 and no special-casing is needed beyond
/// the support test.
double bump(double z) {
  const double d = 0.25 - z * z;
  if (d <= 0.0) return 0.0;
  return std::exp(-1.0 / d);
}

double unnormalised(double z) {
  return std::sin(2.0 * std::numbers::pi * z) * bump(z);
}

}  // namespace

double CutoffProfile::value(double z) const { return c1_ * unnormalised(z); }

double CutoffProfile::derivative(double z) const {
  const double d = 0.25 - z * z;
  if (d <= 0.0) return 0.0;
  const double two_pi = 2.0 * std::numbers::pi;
  // d/dz [sin(2 pi z) e^{-1/d}] with d = 1/4 - z^2:
  //   e^{-1/d} (2 pi cos(2 pi z) - 2 z sin(2 pi z) / d^2).
  // Near the endpoints the 1/d^2 growth loses to the e^{-1/d} decay, which
  // underflows first, so the product stays finite all the way out.
  const double b = std::exp(-1.0 / d);
  return c1_ * b *
         (two_pi * std::cos(two_pi * z) -
          2.0 * z * std::sin(two_pi * z) / (d * d));
}

CutoffProfile build_cutoff(int smoothness_order) {
  if (smoothness_order < 6) {
    throw std::invalid_argument(
        "build_cutoff: smoothness_order must be at least 6, got " +
        std::to_string(smoothness_order));
  }
  // The square of the profile is smooth with all derivatives vanishing at the
  // endpoints; composite Simpson at this resolution is exact to round-off.
  constexpr int kNodes = 32769;
  std::vector<double> f2(kNodes);
  const double dz = 1.0 / (kNodes - 1);
  for (int k = 0; k < kNodes; ++k) {
    const double u = unnormalised(-0.5 + k * dz);
    f2[k] = u * u;
  }
  const double norm2 = simpson(f2, dz);
  CutoffProfile profile;
  profile.c1_ = 1.0 / std::sqrt(norm2);
  profile.order_ = smoothness_order;
  return profile;
}

}  // namespace qss
