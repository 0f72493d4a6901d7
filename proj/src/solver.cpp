#include "qss/solver.hpp"

#include <cmath>
#include <complex>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <utility>

#include "qss/spectral.hpp"

namespace qss {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

inline int signed_kx(int i, int n) { return i <= n / 2 ? i : i - n; }
inline double pack_weight(int jh, int n) {
  return (jh == 0 || 2 * jh == n) ? 1.0 : 2.0;
}

using Coeffs = std::vector<std::complex<double>>;

/// Largest |v| over a sampled vector grid.
double sup_speed(const GridField& v) {
  const auto vx = v.component(0);
  const auto vy = v.component(1);
  double m2 = 0.0;
  for (std::size_t k = 0; k < vx.size(); ++k)
    m2 = std::max(m2, vx[k] * vx[k] + vy[k] * vy[k]);
  return std::sqrt(m2);
}

/// Two-slot sample cache: RK4 revisits each stage time once or twice and
/// the step end becomes the next step's start.
class SampledVelocity {
 public:
  SampledVelocity(const VelocityField& v, int n) : v_(v) {
    for (auto& s : slots_) s.grid = GridField::vector2(n);
  }
  const GridField& at(double t) {
    for (auto& s : slots_)
      if (s.valid && s.t == t) return s.grid;
    Slot& s = slots_[next_];
    next_ = 1 - next_;
    v_.sample(t, s.grid);
    s.t = t;
    s.valid = true;
    return s.grid;
  }

 private:
  struct Slot {
    double t = 0.0;
    bool valid = false;
    GridField grid = GridField::scalar(2);
  };
  const VelocityField& v_;
  Slot slots_[2];
  int next_ = 0;
};

/// Spectral state together with the fixed per-resolution tables the stepper
/// needs: dealias mask, derivative multipliers, Parseval weights.
struct Stepper {
  int n, ld;
  std::vector<double> mask;      // 1 inside the two-thirds ball
  std::vector<double> ddx, ddy;  // 2 pi k multipliers (imaginary parts)
  std::vector<double> wgt;       // Parseval pack weights
  std::vector<double> k2;        // kx^2 + ky^2 (integer units)

  Coeffs theta, n1, n2, n3, n4, stage;
  std::vector<double> gx, gy, prod;

  explicit Stepper(int resolution) : n(resolution), ld(resolution / 2 + 1) {
    const std::size_t m = std::size_t(n) * ld;
    mask.resize(m);
    ddx.resize(m);
    ddy.resize(m);
    wgt.resize(m);
    k2.resize(m);
    const int limit = n / 3;
    for (int i = 0; i < n; ++i) {
      const int kx = signed_kx(i, n);
      for (int jh = 0; jh < ld; ++jh) {
        const std::size_t idx = std::size_t(i) * ld + jh;
        mask[idx] = (std::abs(kx) <= limit && jh <= limit) ? 1.0 : 0.0;
        ddx[idx] = kTwoPi * kx;
        ddy[idx] = kTwoPi * jh;
        wgt[idx] = pack_weight(jh, n);
        k2[idx] = double(kx) * kx + double(jh) * jh;
      }
    }
    theta.resize(m);
    n1.resize(m);
    n2.resize(m);
    n3.resize(m);
    n4.resize(m);
    stage.resize(m);
    gx.resize(std::size_t(n) * n);
    gy.resize(std::size_t(n) * n);
    prod.resize(std::size_t(n) * n);
  }

  /// Advection term N = -dealias(v . grad theta), zero mode pinned.
  void advection(const Coeffs& state, const GridField& v, Coeffs& out) {
    const std::size_t m = state.size();
    for (std::size_t k = 0; k < m; ++k)
      out[k] = std::complex<double>(0.0, ddx[k] * mask[k]) * state[k];
    raw_inverse_transform(n, out.data(), gx.data());
    for (std::size_t k = 0; k < m; ++k)
      out[k] = std::complex<double>(0.0, ddy[k] * mask[k]) * state[k];
    raw_inverse_transform(n, out.data(), gy.data());

    const auto vx = v.component(0);
    const auto vy = v.component(1);
    const double inv = 1.0 / (double(n) * n);  // undo c2r+r2c round trip
    for (std::size_t g = 0; g < prod.size(); ++g)
      prod[g] = -(vx[g] * gx[g] + vy[g] * gy[g]) * inv;
    raw_forward_transform(n, prod.data(), out.data());
    for (std::size_t k = 0; k < m; ++k) out[k] *= mask[k];
    out[0] = 0.0;  // exact mean conservation
  }

  double l2() const {
    double s = 0.0;
    for (std::size_t k = 0; k < theta.size(); ++k)
      s += wgt[k] * std::norm(theta[k]);
    return std::sqrt(s);
  }
  double grad_sq() const {
    double s = 0.0;
    for (std::size_t k = 0; k < theta.size(); ++k)
      s += wgt[k] * kTwoPi * kTwoPi * k2[k] * std::norm(theta[k]);
    return s;
  }
  GridField to_grid() const {
    Coeffs tmp = theta;
    GridField g = GridField::scalar(n);
    raw_inverse_transform(n, tmp.data(), g.component(0).data());
    return g;
  }
};

}  // namespace

StaticVelocity::StaticVelocity(GridField v) : v_(std::move(v)) {
  if (v_.components() != 2)
    throw std::invalid_argument("StaticVelocity: two components required");
}

void StaticVelocity::sample(double, GridField& v) const { v = v_; }

void FunctionVelocity::sample(double t, GridField& v) const {
  const int n = v.resolution();
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const Vec2 u = f_(v.cell_centre(i, j), t);
      v.at(0, i, j) = u.x;
      v.at(1, i, j) = u.y;
    }
}

double divergence_defect(const GridField& v) {
  if (v.components() != 2)
    throw std::invalid_argument("divergence_defect: two components required");
  const SpectralField fx = SpectralField::forward(v, 0);
  const SpectralField fy = SpectralField::forward(v, 1);
  const int n = v.resolution();
  double div2 = 0.0, grad2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double kx = signed_kx(i, n);
    for (int jh = 0; jh < n / 2 + 1; ++jh) {
      const double w = pack_weight(jh, n);
      const std::complex<double> d =
          kx * fx.at(i, jh) + double(jh) * fy.at(i, jh);
      div2 += w * std::norm(d);
      grad2 += w * (kx * kx + double(jh) * jh) *
               (std::norm(fx.at(i, jh)) + std::norm(fy.at(i, jh)));
    }
  }
  return grad2 > 0.0 ? std::sqrt(div2 / grad2) : 0.0;
}

GridField helmholtz_project(const GridField& v, double* removed) {
  if (v.components() != 2)
    throw std::invalid_argument("helmholtz_project: two components required");
  const int n = v.resolution();
  const int ld = n / 2 + 1;
  const std::size_t m = std::size_t(n) * ld;
  std::vector<std::complex<double>> cx(m), cy(m);
  raw_forward_transform(n, v.component(0).data(), cx.data());
  raw_forward_transform(n, v.component(1).data(), cy.data());
  double removed_sq = 0.0;
  for (int i = 0; i < n; ++i) {
    const int kx = signed_kx(i, n);
    for (int jh = 0; jh < ld; ++jh) {
      const std::size_t idx = std::size_t(i) * ld + jh;
      if (2 * std::abs(kx) == n || 2 * jh == n) {
        // Nyquist lines: the stored entry stands for a +-n/2 pair, so no
        // consistent signed frequency exists; drop them.
        removed_sq += pack_weight(jh, n) * (std::norm(cx[idx]) + std::norm(cy[idx]));
        cx[idx] = 0.0;
        cy[idx] = 0.0;
        continue;
      }
      if (kx == 0 && jh == 0) continue;
      const double k2 = double(kx) * kx + double(jh) * jh;
      const std::complex<double> d =
          (double(kx) * cx[idx] + double(jh) * cy[idx]) / k2;
      removed_sq += pack_weight(jh, n) * std::norm(d) * k2;
      cx[idx] -= double(kx) * d;
      cy[idx] -= double(jh) * d;
    }
  }
  GridField out = GridField::vector2(n);
  std::vector<double> buf(std::size_t(n) * n);
  const double inv = 1.0 / (double(n) * n);
  raw_inverse_transform(n, cx.data(), buf.data());
  for (std::size_t k = 0; k < buf.size(); ++k)
    out.component(0)[k] = buf[k] * inv;
  raw_inverse_transform(n, cy.data(), buf.data());
  for (std::size_t k = 0; k < buf.size(); ++k)
    out.component(1)[k] = buf[k] * inv;
  if (removed) *removed = std::sqrt(removed_sq) * inv;
  return out;
}

void ProjectedVelocity::sample(double t, GridField& v) const {
  inner_.sample(t, v);
  double rem = 0.0;
  v = helmholtz_project(v, &rem);
  removed_ = std::max(removed_, rem);
}

double integrate_series(const std::vector<double>& times,
                        const std::vector<double>& values) {
  if (times.size() != values.size())
    throw std::invalid_argument("integrate_series: length mismatch");
  const std::size_t n = times.size();
  if (n < 2) return 0.0;
  if (n == 2)
    return 0.5 * (values[0] + values[1]) * (times[1] - times[0]);

  // Quadratic slices over consecutive point triples (non-uniform Simpson);
  // an odd final interval integrates the quadratic through the last three
  // points over that interval alone.
  double total = 0.0;
  std::size_t i = 0;
  while (i + 2 < n) {
    const double h1 = times[i + 1] - times[i], h2 = times[i + 2] - times[i + 1];
    const double H = h1 + h2;
    total += H / 6.0 *
             ((2.0 - h2 / h1) * values[i] + H * H / (h1 * h2) * values[i + 1] +
              (2.0 - h1 / h2) * values[i + 2]);
    i += 2;
  }
  if (i + 1 < n) {  // one interval left: quadratic through the last triple
    const double h1 = times[n - 2] - times[n - 3],
                 h2 = times[n - 1] - times[n - 2];
    const double a = values[n - 3], b = values[n - 2], c = values[n - 1];
    const double d1 = (b - a) / h1;
    const double d2 = ((c - b) / h2 - d1) / (h1 + h2);
    // Newton form integrated over the final interval only.
    total += a * h2 + d1 * (0.5 * h2 * h2 + h1 * h2) +
             d2 * (h2 * h2 * h2 / 3.0 + 0.5 * h1 * h2 * h2);
  }
  return total;
}

Trajectory advect_diffuse(const VelocityField& v, const GridField& theta0,
                          double mu, std::pair<double, double> t_span,
                          double dt, int checkpoints) {
  if (theta0.components() != 1)
    throw std::invalid_argument("advect_diffuse: scalar initial state required");
  if (!(dt > 0.0) || !(t_span.second > t_span.first))
    throw std::invalid_argument("advect_diffuse: need dt > 0 and t1 > t0");
  if (mu < 0.0) throw std::invalid_argument("advect_diffuse: mu must be >= 0");

  const int n = theta0.resolution();
  Stepper st(n);
  const std::size_t m = st.theta.size();

  // Initial state, projected into the dealiased ball.
  raw_forward_transform(n, theta0.component(0).data(), st.theta.data());
  const double inv_n2 = 1.0 / (double(n) * n);
  for (std::size_t k = 0; k < m; ++k) st.theta[k] *= inv_n2 * st.mask[k];

  SampledVelocity vs(v, n);
  const GridField& v0 = vs.at(t_span.first);
  if (v0.resolution() != n || v0.components() != 2)
    throw std::invalid_argument(
        "advect_diffuse: velocity samples must be two-component grids at the "
        "scalar's resolution");
  const double defect = divergence_defect(v0);
  if (defect > 1e-6) {
    std::ostringstream msg;
    msg << "advect_diffuse: sampled velocity is not solenoidal (relative "
           "defect "
        << defect << " > 1e-6)";
    throw std::invalid_argument(msg.str());
  }
  {
    const double s = sup_speed(v0);
    if (s > 0.0 && dt > 0.5 / (n * s)) {
      std::ostringstream msg;
      msg << "advect_diffuse: dt " << dt << " violates the CFL bound "
          << 0.5 / (n * s) << " at the initial sample";
      throw std::invalid_argument(msg.str());
    }
  }

  Trajectory out;
  out.times.push_back(t_span.first);
  out.l2.push_back(st.l2());
  out.grad_sq.push_back(st.grad_sq());

  std::vector<double> e_half(m), e_full(m);
  double table_dt = -1.0;
  const auto refresh_tables = [&](double step) {
    for (std::size_t k = 0; k < m; ++k) {
      const double lam = -mu * kTwoPi * kTwoPi * st.k2[k];
      e_half[k] = std::exp(lam * 0.5 * step);
      e_full[k] = std::exp(lam * step);
    }
    table_dt = step;
  };

  const double span = t_span.second - t_span.first;
  double t = t_span.first;
  int stored = 0;

  while (t < t_span.second - 1e-14 * span) {
    double step = std::min(dt, t_span.second - t);
    if (checkpoints > 0 && stored < checkpoints) {
      const double next_cp =
          t_span.first + span * double(stored + 1) / checkpoints;
      if (t + step > next_cp - 1e-14 * span) step = next_cp - t;
    }

    const GridField& va = vs.at(t);
    const double s = sup_speed(va);
    if (s > 0.0 && step > 0.5 / (n * s)) {
      std::ostringstream msg;
      msg << "advect_diffuse: CFL violated at t = " << t << " (sup speed "
          << s << ", step " << step << ")";
      throw std::runtime_error(msg.str());
    }
    if (mu > 0.0 && step != table_dt) refresh_tables(step);

    // Each sample is fetched just before use: the cache holds two grids and
    // the mid-step fetch would otherwise evict the start-of-step sample.
    st.advection(st.theta, va, st.n1);
    if (mu > 0.0) {
      for (std::size_t k = 0; k < m; ++k)
        st.stage[k] = e_half[k] * (st.theta[k] + 0.5 * step * st.n1[k]);
      {
        const GridField& vb = vs.at(t + 0.5 * step);
        st.advection(st.stage, vb, st.n2);
        for (std::size_t k = 0; k < m; ++k)
          st.stage[k] = e_half[k] * st.theta[k] + 0.5 * step * st.n2[k];
        st.advection(st.stage, vb, st.n3);
      }
      for (std::size_t k = 0; k < m; ++k)
        st.stage[k] = e_full[k] * st.theta[k] + step * e_half[k] * st.n3[k];
      st.advection(st.stage, vs.at(t + step), st.n4);
      for (std::size_t k = 0; k < m; ++k)
        st.theta[k] = e_full[k] * st.theta[k] +
                      step / 6.0 *
                          (e_full[k] * st.n1[k] +
                           2.0 * e_half[k] * (st.n2[k] + st.n3[k]) +
                           st.n4[k]);
    } else {
      for (std::size_t k = 0; k < m; ++k)
        st.stage[k] = st.theta[k] + 0.5 * step * st.n1[k];
      {
        const GridField& vb = vs.at(t + 0.5 * step);
        st.advection(st.stage, vb, st.n2);
        for (std::size_t k = 0; k < m; ++k)
          st.stage[k] = st.theta[k] + 0.5 * step * st.n2[k];
        st.advection(st.stage, vb, st.n3);
      }
      for (std::size_t k = 0; k < m; ++k)
        st.stage[k] = st.theta[k] + step * st.n3[k];
      st.advection(st.stage, vs.at(t + step), st.n4);
      for (std::size_t k = 0; k < m; ++k)
        st.theta[k] +=
            step / 6.0 * (st.n1[k] + 2.0 * (st.n2[k] + st.n3[k]) + st.n4[k]);
    }

    t += step;
    ++out.steps;
    const double l2 = st.l2();
    if (!std::isfinite(l2)) {
      std::ostringstream msg;
      msg << "advect_diffuse: state is not finite at t = " << t << " (step "
          << out.steps << ")";
      throw std::runtime_error(msg.str());
    }
    out.times.push_back(t);
    out.l2.push_back(l2);
    out.grad_sq.push_back(st.grad_sq());

    if (checkpoints > 0 && stored < checkpoints) {
      const double next_cp =
          t_span.first + span * double(stored + 1) / checkpoints;
      if (t >= next_cp - 1e-12 * span) {
        out.checkpoint_times.push_back(t);
        out.checkpoints.push_back(st.to_grid());
        ++stored;
      }
    }
  }

  out.final_state = st.to_grid();
  out.diffusion_integral = integrate_series(out.times, out.grad_sq);
  return out;
}

Trajectory transport(const VelocityField& v, const GridField& rho0,
                     std::pair<double, double> t_span, double dt,
                     int checkpoints) {
  return advect_diffuse(v, rho0, 0.0, t_span, dt, checkpoints);
}

}  // namespace qss
