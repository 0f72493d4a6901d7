#include "qss/spectral.hpp"

#include <fftw3.h>

#include <cmath>
#include <cstring>
#include <limits>
#include <map>
#include <numbers>
#include <stdexcept>

namespace qss {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Per-resolution FFTW state: one real and one packed-complex buffer with
/// plans bound to them. Estimate-mode planning only, per the project's
/// determinism requirements.
struct Workspace {
  int n = 0;
  double* real = nullptr;
  fftw_complex* cplx = nullptr;
  fftw_plan fwd = nullptr, bwd = nullptr;

  explicit Workspace(int resolution) : n(resolution) {
    real = fftw_alloc_real(std::size_t(n) * n);
    cplx = fftw_alloc_complex(std::size_t(n) * (n / 2 + 1));
    if (!real || !cplx) throw std::runtime_error("spectral: allocation failed");
    fwd = fftw_plan_dft_r2c_2d(n, n, real, cplx, FFTW_ESTIMATE);
    bwd = fftw_plan_dft_c2r_2d(n, n, cplx, real, FFTW_ESTIMATE);
    if (!fwd || !bwd) throw std::runtime_error("spectral: planning failed");
  }
  Workspace(const Workspace&) = delete;
  Workspace& operator=(const Workspace&) = delete;
  ~Workspace() {
    if (fwd) fftw_destroy_plan(fwd);
    if (bwd) fftw_destroy_plan(bwd);
    fftw_free(real);
    fftw_free(cplx);
  }
};

Workspace& workspace(int n) {
  static std::map<int, Workspace> pool;
  auto it = pool.find(n);
  if (it == pool.end()) it = pool.try_emplace(n, n).first;
  return it->second;
}

inline int signed_kx(int i, int n) { return i <= n / 2 ? i : i - n; }

/// Half-cell phase: grid samples sit at cell centres, so the array DFT
/// differs from the true coefficients by exp(-i pi (kx+ky)/n).
inline std::complex<double> centre_phase(int kx, int ky, int n) {
  const double arg = -std::numbers::pi * double(kx + ky) / n;
  return {std::cos(arg), std::sin(arg)};
}

/// Parseval weight of a packed entry: conjugate pairs are stored once.
inline double pack_weight(int jh, int n) {
  return (jh == 0 || 2 * jh == n) ? 1.0 : 2.0;
}

}  // namespace

void raw_forward_transform(int n, const double* grid,
                           std::complex<double>* coef) {
  Workspace& ws = workspace(n);
  std::memcpy(ws.real, grid, std::size_t(n) * n * sizeof(double));
  fftw_execute(ws.fwd);
  std::memcpy(coef, ws.cplx,
              std::size_t(n) * (n / 2 + 1) * sizeof(fftw_complex));
}

void raw_inverse_transform(int n, const std::complex<double>* coef,
                           double* grid) {
  Workspace& ws = workspace(n);
  std::memcpy(ws.cplx, coef,
              std::size_t(n) * (n / 2 + 1) * sizeof(fftw_complex));
  fftw_execute(ws.bwd);
  std::memcpy(grid, ws.real, std::size_t(n) * n * sizeof(double));
}

SpectralField SpectralField::forward(const GridField& g, int component) {
  if (component < 0 || component >= g.components())
    throw std::invalid_argument("SpectralField::forward: no such component");
  const int n = g.resolution();
  Workspace& ws = workspace(n);
  const auto src = g.component(component);
  std::memcpy(ws.real, src.data(), src.size() * sizeof(double));
  fftw_execute(ws.fwd);

  SpectralField f(n);
  const double inv = 1.0 / (double(n) * n);
  const int ld = n / 2 + 1;
  for (int i = 0; i < n; ++i) {
    const int kx = signed_kx(i, n);
    for (int jh = 0; jh < ld; ++jh) {
      const std::complex<double> raw{ws.cplx[std::size_t(i) * ld + jh][0],
                                     ws.cplx[std::size_t(i) * ld + jh][1]};
      f.a_[std::size_t(i) * ld + jh] = raw * inv * centre_phase(kx, jh, n);
    }
  }
  return f;
}

GridField SpectralField::inverse() const {
  const int n = n_;
  Workspace& ws = workspace(n);
  const int ld = n / 2 + 1;
  for (int i = 0; i < n; ++i) {
    const int kx = signed_kx(i, n);
    for (int jh = 0; jh < ld; ++jh) {
      const std::complex<double> c =
          a_[std::size_t(i) * ld + jh] / centre_phase(kx, jh, n);
      ws.cplx[std::size_t(i) * ld + jh][0] = c.real();
      ws.cplx[std::size_t(i) * ld + jh][1] = c.imag();
    }
  }
  fftw_execute(ws.bwd);  // destroys the complex buffer; we refill each call
  GridField g = GridField::scalar(n);
  std::memcpy(g.component(0).data(), ws.real,
              std::size_t(n) * n * sizeof(double));
  return g;
}

std::complex<double> SpectralField::coefficient(int kx, int ky) const {
  if (ky < 0 || ky > n_ / 2 || kx <= -n_ / 2 || kx > n_ / 2)
    throw std::invalid_argument("SpectralField::coefficient: out of band");
  const int i = kx >= 0 ? kx : kx + n_;
  return at(i, ky);
}

double SpectralField::l2norm() const {
  const int ld = n_ / 2 + 1;
  double s = 0.0;
  for (int i = 0; i < n_; ++i)
    for (int jh = 0; jh < ld; ++jh)
      s += pack_weight(jh, n_) * std::norm(a_[std::size_t(i) * ld + jh]);
  return std::sqrt(s);
}

double SpectralField::grad_l2norm() const {
  const int ld = n_ / 2 + 1;
  double s = 0.0;
  for (int i = 0; i < n_; ++i) {
    const double kx = signed_kx(i, n_);
    for (int jh = 0; jh < ld; ++jh) {
      const double k2 = kx * kx + double(jh) * jh;
      s += pack_weight(jh, n_) * kTwoPi * kTwoPi * k2 *
           std::norm(a_[std::size_t(i) * ld + jh]);
    }
  }
  return std::sqrt(s);
}

SpectralField SpectralField::project_low(double cutoff) const {
  SpectralField out = *this;
  const int ld = n_ / 2 + 1;
  for (int i = 0; i < n_; ++i) {
    const double kx = signed_kx(i, n_);
    for (int jh = 0; jh < ld; ++jh)
      if (std::hypot(kx, double(jh)) > cutoff)
        out.a_[std::size_t(i) * ld + jh] = 0.0;
  }
  return out;
}

SpectralField SpectralField::project_high(double cutoff) const {
  SpectralField out = *this;
  const int ld = n_ / 2 + 1;
  for (int i = 0; i < n_; ++i) {
    const double kx = signed_kx(i, n_);
    for (int jh = 0; jh < ld; ++jh)
      if (std::hypot(kx, double(jh)) <= cutoff)
        out.a_[std::size_t(i) * ld + jh] = 0.0;
  }
  return out;
}

double h_minus1_norm(const SpectralField& f) {
  if (std::abs(f.mean()) > 1e-8)
    throw std::invalid_argument(
        "h_minus1_norm: field mean exceeds 1e-8; the inverse-gradient norm "
        "needs a mean-free field");
  const int n = f.resolution();
  const int ld = n / 2 + 1;
  double s = 0.0;
  for (int i = 0; i < n; ++i) {
    const double kx = signed_kx(i, n);
    for (int jh = 0; jh < ld; ++jh) {
      const double k2 = kx * kx + double(jh) * jh;
      if (k2 == 0.0) continue;
      s += pack_weight(jh, n) * std::norm(f.at(i, jh)) /
           (kTwoPi * kTwoPi * k2);
    }
  }
  return std::sqrt(s);
}

double low_freq_mass(const SpectralField& f, double cutoff) {
  const int n = f.resolution();
  const int ld = n / 2 + 1;
  double s = 0.0;
  for (int i = 0; i < n; ++i) {
    const double kx = signed_kx(i, n);
    for (int jh = 0; jh < ld; ++jh)
      if (std::hypot(kx, double(jh)) <= cutoff)
        s += pack_weight(jh, n) * std::norm(f.at(i, jh));
  }
  return std::sqrt(s);
}

double spectral_tail_fraction(const SpectralField& f) {
  const int n = f.resolution();
  const int ld = n / 2 + 1;
  const double boundary = n / 3.0;
  double tail = 0.0, total = 0.0;
  for (int i = 0; i < n; ++i) {
    const double kx = signed_kx(i, n);
    for (int jh = 0; jh < ld; ++jh) {
      const double e = pack_weight(jh, n) * std::norm(f.at(i, jh));
      total += e;
      if (std::hypot(kx, double(jh)) > boundary) tail += e;
    }
  }
  return total > 0.0 ? tail / total : 0.0;
}

double bernstein_ratio(const SpectralField& f, double cutoff) {
  const SpectralField high = f.project_high(cutoff);
  const double mass = high.l2norm();
  if (mass == 0.0) return std::numeric_limits<double>::infinity();
  return high.grad_l2norm() / (kTwoPi * cutoff * mass);
}

}  // namespace qss
