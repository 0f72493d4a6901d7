#pragma once
/// Fourier-side representation of periodic grid fields and the frequency
/// diagnostics built on it.
///
/// A SpectralField holds the half-plane coefficients of a real field on the
/// unit torus in the packed real-transform layout: entry (i, jh) with
/// i in [0, n) and jh in [0, n/2] is the coefficient of the integer
/// frequency (kx, ky) = (i <= n/2 ? i : i - n, jh); coefficients are
/// normalised so that value(k) is the true Fourier coefficient
/// integral of f(x) e^{-2 pi i k.x}. Frequencies with 0 < ky < n/2
/// represent a conjugate pair and carry weight 2 in every Parseval sum.
///
/// Unit conventions, used consistently below: cutoffs (low_freq_mass,
/// projections, Bernstein) are in integer frequency units, cycles per box
/// length; gradient and inverse-gradient weights carry the physical factor
/// 2 pi |k|, which is what makes a single unit-frequency mode have inverse
/// gradient norm 1/(2 pi).

#include <complex>
#include <cstddef>
#include <vector>

#include "qss/grid_field.hpp"

namespace qss {

class SpectralField {
 public:
  /// Forward transform of one component of a physical-space grid.
  static SpectralField forward(const GridField& g, int component = 0);

  /// Inverse transform back to a physical grid (round trip is identity to
  /// 1e-12 of the sup).
  GridField inverse() const;

  int resolution() const { return n_; }
  /// Packed half-plane size n * (n/2 + 1).
  std::size_t size() const { return a_.size(); }

  std::complex<double>& at(int i, int jh) {
    return a_[std::size_t(i) * (n_ / 2 + 1) + jh];
  }
  std::complex<double> at(int i, int jh) const {
    return a_[std::size_t(i) * (n_ / 2 + 1) + jh];
  }
  /// Coefficient of integer frequency (kx, ky), ky >= 0.
  std::complex<double> coefficient(int kx, int ky) const;

  std::vector<std::complex<double>>& values() { return a_; }
  const std::vector<std::complex<double>>& values() const { return a_; }

  /// Mean of the underlying real field (the zero mode, real part).
  double mean() const { return a_[0].real(); }

  /// Parseval L2 norm of the real field.
  double l2norm() const;
  /// Parseval norm of the gradient, weights 2 pi |k|.
  double grad_l2norm() const;

  /// Sharp truncation to |k| <= cutoff (integer units); the complement.
  SpectralField project_low(double cutoff) const;
  SpectralField project_high(double cutoff) const;

 private:
  SpectralField(int n) : n_(n), a_(std::size_t(n) * (n / 2 + 1)) {}
  int n_ = 0;
  std::vector<std::complex<double>> a_;
};

/// (sum over k != 0 of |2 pi k|^-2 |f_k|^2)^(1/2); the mixing scale of a
/// mean-free scalar. Rejects fields whose mean exceeds 1e-8.
double h_minus1_norm(const SpectralField& f);

/// L2 norm of the sharp truncation to |k| <= cutoff (integer units).
double low_freq_mass(const SpectralField& f, double cutoff);

/// Fraction of the L2 energy carried by frequencies above the two-thirds
/// dealias boundary; the under-resolution indicator.
double spectral_tail_fraction(const SpectralField& f);

/// ||grad P_{>K} f|| / (2 pi K ||P_{>K} f||); at least 1 for every field
/// with content above the cutoff (sharp frequency-support bound).
double bernstein_ratio(const SpectralField& f, double cutoff);

// ---------------------------------------------------------------------------
// Pooled raw transforms
// ---------------------------------------------------------------------------
// Unnormalised packed half-plane transforms sharing the per-resolution plan
// pool. `coef` holds n * (n/2 + 1) entries, (i, jh) at i*(n/2+1)+jh; the
// forward output is the plain array DFT (no 1/n^2, no half-cell phase), and
// inverse(forward(g)) = n^2 g. Time-stepping code that only ever applies
// diagonal multipliers uses these to avoid per-call normalisation passes.

void raw_forward_transform(int n, const double* grid,
                           std::complex<double>* coef);
void raw_inverse_transform(int n, const std::complex<double>* coef,
                           double* grid);

// ---------------------------------------------------------------------------
// Level-wise mixing-norm sweep
// ---------------------------------------------------------------------------

class LocalFieldSet;  // local_fields.hpp

/// One level of the mixing-norm sweep. Levels up to direct_max are computed
/// by transforming the assembled scalar on a tile-divisible grid; deeper
/// levels use the block-spectrum estimator (per-member spectra combined with
/// exact multiplicities plus the coherent tile-lattice lines), calibrated by
/// the measured direct/estimate ratio at the deepest direct level.
struct MixNormPoint {
  int level = 0;
  double value = 0.0;      ///< the value entering the slope fit
  double raw_estimate = 0.0;  ///< uncalibrated estimate (0 for direct levels)
  bool estimated = false;
};

struct MixNormSweep {
  std::vector<MixNormPoint> points;
  double slope = 0.0;              ///< least-squares slope of log5 value vs n
  std::vector<double> estimator_ratio;  ///< direct/estimate at direct levels
};

/// Mixing norms of the assembled scalar for levels 0..n_max at time t.
/// Levels <= direct_max_level (clamped to 2; resolutions 2048/2500/8000)
/// are transformed directly; deeper levels are estimated. Throws if n_max
/// is outside [1, 4] or exceeds what the estimator supports.
MixNormSweep mix_norm_sweep(const LocalFieldSet& set, double t, int n_max,
                            int direct_max_level = 2);

/// Largest cutoff (integer units, scanned over cutoff = Lambda * 5 at level
/// 1) whose low-frequency mass stays at or below the threshold; returns
/// Lambda. Used to fix the frequency-concentration scale.
double calibrate_concentration_cutoff(const LocalFieldSet& set, double t,
                                      double mass_threshold = 0.1);

/// Low-frequency mass of the assembled level-n scalar at cutoff
/// Lambda * 5^n (integer units). Direct transform for n <= 2, block
/// estimator for n = 3.
double concentration_mass(const LocalFieldSet& set, double t, int level,
                          double lambda_cutoff);

}  // namespace qss
