#include "qss/perturbation.hpp"

#include <cmath>

namespace qss {

PerturbationAnalysis analyse_perturbation(const Curve& curve, const FrenetData& fr,
                                          std::span<const double> h) {
  const int n = curve.size();
  const double ds = curve.ds();
  FiniteDiff fd(n, ds, curve.closed);

  std::vector<double> hv(h.begin(), h.end());
  const auto hp = fd.derivative(hv, 1);
  const auto hpp = fd.derivative(hv, 2);

  // Reference: re-run the Frenet computation on the offset samples.
  const Curve pert = offset_curve(curve, fr, h);
  const FrenetData pfr = frenet(pert);

  PerturbationAnalysis out;
  out.stretch_fd.resize(n);
  out.stretch_closed_form.resize(n);
  out.stretch_first_order.resize(n);
  out.tau_fd = pfr.tau;
  out.tau_first_order.resize(n);
  out.kappa_fd = pfr.kappa;
  out.kappa_closed_form.resize(n);
  out.kappa_first_order.resize(n);

  for (int i = 0; i < n; ++i) {
    const double l = fr.speed[i];
    const double k = fr.kappa[i];
    const double ks = fr.kappa_s[i];
    const double a = 1.0 - h[i] * k;

    out.stretch_fd[i] = pfr.speed[i] / l;
    out.stretch_closed_form[i] = std::sqrt(a * a + (hp[i] / l) * (hp[i] / l));
    out.stretch_first_order[i] = a;

    out.tau_first_order[i] = fr.tau[i] + (hp[i] / l) * fr.eta[i];

    // Exact curvature of gamma + h eta in terms of the base frame:
    // with A = l (1 - h kappa), B = h',
    //   kappa_tilde = [A B' - A' B + l kappa (A^2 + B^2)] / (A^2 + B^2)^{3/2}
    // which expands to the expression below.
    const double num = l * (l * l * k * a * a + a * hpp[i] + 2.0 * k * hp[i] * hp[i] +
                            ks * h[i] * hp[i]);
    const double den = l * l * a * a + hp[i] * hp[i];
    out.kappa_closed_form[i] = num / std::pow(den, 1.5);
    out.kappa_first_order[i] = k + k * k * h[i] + hpp[i] / (l * l);
  }
  return out;
}

double area_difference(const Curve& curve, const FrenetData& fr,
                       std::span<const double> h) {
  const int n = curve.size();
  std::vector<double> f1(n), f2(n);
  for (int i = 0; i < n; ++i) {
    f1[i] = h[i] * fr.speed[i];
    f2[i] = h[i] * h[i] * fr.kappa[i] * fr.speed[i];
  }
  const double ds = curve.ds();
  const double i1 = trapezoid(f1, ds, curve.closed);
  const double i2 = trapezoid(f2, ds, curve.closed);
  const double signed_change = -i1 + 0.5 * i2;
  const double orient =
      curve.closed ? (polygon_area(curve) >= 0.0 ? 1.0 : -1.0) : -1.0;
  return orient * signed_change;
}

double perturbed_length(const Curve& curve, const FrenetData& fr,
                        std::span<const double> h) {
  const int n = curve.size();
  const double ds = curve.ds();
  FiniteDiff fd(n, ds, curve.closed);
  std::vector<double> hv(h.begin(), h.end());
  const auto hp = fd.derivative(hv, 1);
  std::vector<double> f(n);
  for (int i = 0; i < n; ++i) {
    const double l = fr.speed[i];
    const double a = l * (1.0 - h[i] * fr.kappa[i]);
    f[i] = std::sqrt(a * a + hp[i] * hp[i]);
  }
  return trapezoid(f, ds, curve.closed);
}

double length_first_variation(const Curve& curve, const FrenetData& fr,
                              std::span<const double> h) {
  const int n = curve.size();
  std::vector<double> f(n);
  for (int i = 0; i < n; ++i) f[i] = -fr.kappa[i] * h[i] * fr.speed[i];
  return trapezoid(f, curve.ds(), curve.closed);
}

}  // namespace qss
