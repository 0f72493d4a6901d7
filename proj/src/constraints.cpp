#include "qss/constraints.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace qss {

std::vector<double> make_area_basis(const Curve& curve, const FrenetData& fr) {
  const int n = curve.size();
  std::vector<double> phi(n);
  if (curve.closed) {
    for (int i = 0; i < n; ++i) phi[i] = 1.0;
  } else {
    for (int i = 0; i < n; ++i) {
      const double u = double(i) / (n - 1);
      phi[i] = std::pow(u * (1.0 - u), 7);
    }
  }
  std::vector<double> integrand(n);
  for (int i = 0; i < n; ++i) integrand[i] = phi[i] * fr.speed[i];
  const double mass = trapezoid(integrand, curve.ds(), curve.closed);
  for (int i = 0; i < n; ++i) phi[i] /= mass;
  return phi;
}

std::vector<double> make_length_kernel(const Curve& curve, const FrenetData& fr) {
  const int n = curve.size();
  std::vector<double> psi(n);
  if (curve.closed) {
    for (int i = 0; i < n; ++i)
      psi[i] = std::cos(4.0 * std::numbers::pi * i / double(n));
    return psi;
  }
  // Windowed curvature, made mean-free against the window weight so the
  // direction does not mainly fight the area projection.
  std::vector<double> window(n);
  double wk = 0.0, w = 0.0;
  for (int i = 0; i < n; ++i) {
    const double u = double(i) / (n - 1);
    window[i] = std::pow(4.0 * u * (1.0 - u), 8);
    wk += window[i] * fr.kappa[i] * fr.speed[i];
    w += window[i] * fr.speed[i];
  }
  const double kbar = wk / w;
  double scale = 0.0;
  for (int i = 0; i < n; ++i) {
    psi[i] = window[i] * (fr.kappa[i] - kbar);
    scale = std::max(scale, std::abs(psi[i]));
  }
  if (scale < 1e-12) {
    // Degenerate (straight) curve: fall back to a windowed harmonic.
    for (int i = 0; i < n; ++i) {
      const double u = double(i) / (n - 1);
      psi[i] = window[i] * std::sin(2.0 * std::numbers::pi * u);
    }
    scale = 1.0;
  }
  for (int i = 0; i < n; ++i) psi[i] /= scale;
  return psi;
}

AreaProjection project_area_preserving(const Curve& curve, const FrenetData& fr,
                                       std::span<const double> u,
                                       std::span<const double> phi0, double tol) {
  const int n = curve.size();
  AreaProjection out;
  out.h.assign(u.begin(), u.end());

  auto residual_at = [&](double alpha) {
    std::vector<double> h(n);
    for (int i = 0; i < n; ++i) h[i] = u[i] + alpha * phi0[i];
    return area_difference(curve, fr, h);
  };

  // The residual is exactly quadratic in alpha; Newton with the analytic
  // slope F'(alpha) = orient * (-int phi0 dsigma + int h phi0 kappa dsigma).
  const double orient =
      curve.closed ? (polygon_area(curve) >= 0.0 ? 1.0 : -1.0) : -1.0;
  double alpha = 0.0;
  double res = residual_at(alpha);
  for (out.iterations = 0; out.iterations < 60; ++out.iterations) {
    if (std::abs(res) <= tol) {
      out.converged = true;
      break;
    }
    std::vector<double> f(n);
    for (int i = 0; i < n; ++i) {
      const double h = u[i] + alpha * phi0[i];
      f[i] = (-phi0[i] + h * phi0[i] * fr.kappa[i]) * fr.speed[i];
    }
    const double slope = orient * trapezoid(f, curve.ds(), curve.closed);
    if (slope == 0.0) break;
    alpha -= res / slope;
    res = residual_at(alpha);
  }
  out.alpha = alpha;
  out.residual = res;
  for (int i = 0; i < n; ++i) out.h[i] = u[i] + alpha * phi0[i];
  return out;
}

namespace {

/// Classic Brent root finder on a sign-changing bracket.
template <class F>
double brent(F f, double a, double b, double fa, double fb, double xtol,
             double ftol, int max_iter, int& evals) {
  if (fa * fb > 0.0) throw std::runtime_error("brent: bracket does not sign-change");
  double c = a, fc = fa, d = b - a, e = d;
  for (int it = 0; it < max_iter; ++it) {
    if (std::abs(fc) < std::abs(fb)) {
      a = b; b = c; c = a;
      fa = fb; fb = fc; fc = fa;
    }
    const double tol1 = 2.0 * 1e-16 * std::abs(b) + 0.5 * xtol;
    const double xm = 0.5 * (c - b);
    if (std::abs(xm) <= tol1 || std::abs(fb) <= ftol) return b;
    if (std::abs(e) >= tol1 && std::abs(fa) > std::abs(fb)) {
      const double s = fb / fa;
      double p, q;
      if (a == c) {
        p = 2.0 * xm * s;
        q = 1.0 - s;
      } else {
        const double qq = fa / fc, r = fb / fc;
        p = s * (2.0 * xm * qq * (qq - r) - (b - a) * (r - 1.0));
        q = (qq - 1.0) * (r - 1.0) * (s - 1.0);
      }
      if (p > 0.0) q = -q;
      p = std::abs(p);
      if (2.0 * p < std::min(3.0 * xm * q - std::abs(tol1 * q), std::abs(e * q))) {
        e = d;
        d = p / q;
      } else {
        d = xm;
        e = d;
      }
    } else {
      d = xm;
      e = d;
    }
    a = b;
    fa = fb;
    b += (std::abs(d) > tol1) ? d : (xm > 0 ? tol1 : -tol1);
    fb = f(b);
    ++evals;
    if ((fb > 0) == (fc > 0)) {
      c = a;
      fc = fa;
      d = b - a;
      e = d;
    }
  }
  return b;
}

}  // namespace

FamilyProjection project_equal_length(std::span<const Curve> curves,
                                      std::span<const FrenetData> frenets,
                                      const std::vector<std::vector<double>>& u,
                                      const FamilyProjectionOptions& opts) {
  const int N = int(curves.size());
  if (int(frenets.size()) != N || int(u.size()) != N)
    throw std::invalid_argument("project_equal_length: family size mismatch");

  FamilyProjection out;
  out.h.resize(N);
  out.alpha.assign(N, 0.0);
  out.kernel_coeff.assign(N, 0.0);
  out.converged = true;

  // Reference curve: area projection only.
  std::vector<std::vector<double>> phi(N);
  for (int i = 0; i < N; ++i) phi[i] = make_area_basis(curves[i], frenets[i]);

  AreaProjection ref = project_area_preserving(curves[0], frenets[0], u[0],
                                               phi[0], opts.area_tol);
  out.converged = out.converged && ref.converged;
  out.h[0] = ref.h;
  out.alpha[0] = ref.alpha;
  out.max_area_defect = std::abs(ref.residual);
  const double target_len = perturbed_length(curves[0], frenets[0], ref.h);

  for (int i = 1; i < N; ++i) {
    const auto psi = make_length_kernel(curves[i], frenets[i]);
    const int n = curves[i].size();
    double alpha_i = 0.0, res_i = 0.0;

    // Length defect as a function of the kernel coefficient, with the area
    // constraint restored exactly inside.
    auto defect = [&](double c) {
      std::vector<double> trial(n);
      for (int j = 0; j < n; ++j) trial[j] = u[i][j] + c * psi[j];
      AreaProjection ap = project_area_preserving(curves[i], frenets[i], trial,
                                                  phi[i], opts.area_tol);
      alpha_i = ap.alpha;
      res_i = std::abs(ap.residual);
      return perturbed_length(curves[i], frenets[i], ap.h) - target_len;
    };

    int evals = 0;
    double c0 = 0.0, f0 = defect(c0);
    ++evals;
    double root = c0;
    if (std::abs(f0) > opts.length_tol) {
      // Expand doubling probes in both directions until the defect changes
      // sign; scale from the curve size.
      const double step0 = 1e-4 * curves[i].geometric_length();
      double a = 0.0, fa = f0, b = 0.0, fb = f0;
      bool bracketed = false;
      for (double step = step0; evals < opts.max_evals_per_curve; step *= 2.0) {
        for (double sgn : {+1.0, -1.0}) {
          const double x = sgn * step;
          const double fx = defect(x);
          ++evals;
          if (fa * fx <= 0.0) {
            b = x;
            fb = fx;
            bracketed = true;
            break;
          }
          // Keep the endpoint with the smaller defect as the anchor.
          if (std::abs(fx) < std::abs(fa)) {
            a = x;
            fa = fx;
          }
        }
        if (bracketed) break;
        if (step > 10.0 * curves[i].geometric_length()) break;
      }
      if (!bracketed) {
        out.converged = false;
        root = a;
        defect(root);
      } else {
        root = brent(defect, a, b, fa, fb, 1e-15, opts.length_tol,
                     opts.max_evals_per_curve, evals);
      }
    }

    // Materialise the final slice at the root (defect() leaves no state, so
    // redo its area projection once and keep the projected slice).
    const double final_defect = defect(root);
    ++evals;
    out.kernel_coeff[i] = root;
    {
      std::vector<double> trial(n);
      for (int j = 0; j < n; ++j) trial[j] = u[i][j] + root * psi[j];
      AreaProjection ap = project_area_preserving(curves[i], frenets[i], trial,
                                                  phi[i], opts.area_tol);
      out.h[i] = ap.h;
      out.alpha[i] = ap.alpha;
      out.max_area_defect = std::max(out.max_area_defect, std::abs(ap.residual));
    }
    out.length_defects.push_back(final_defect);
    out.length_evaluations += evals;
    if (std::abs(final_defect) > opts.length_tol) out.converged = false;
  }
  return out;
}

}  // namespace qss
