#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <utility>
#include <vector>

#include "qss/assembly.hpp"
#include "qss/local_fields.hpp"
#include "qss/spectral.hpp"
#include "qss/tiling.hpp"

/// Mixing-norm sweep across tiling levels.
///
/// Levels whose tubes are still resolvable are assembled on a tile-divisible
/// grid and transformed directly. Deeper levels use a block-spectrum
/// estimator: the assembled field is a sum of affinely placed block fields,
/// so away from the tile lattice its energy spectrum is the multiplicity-
/// weighted sum of block spectra sampled at k/lambda (phases of distinct
/// tiles decorrelate), while exactly on the lattice k = lambda j every tile
/// contributes with phase one and the block coefficients add coherently.
/// The estimator therefore replaces the frequency sum by
///
///   lambda^2 sum_xi W(lambda xi) sum_i m_i |c_i(xi)|^2        (diagonal)
///   - the diagonal's own incoherent count of the lattice points
///   + sum_j W(lambda j) |sum_i m_i c_i(j)|^2                  (lattice)
///
/// all times lambda^-4 from the per-tile area scaling, with W the weight of
/// the norm being estimated. The measured direct/estimate ratio at the
/// deepest directly computed level calibrates the deeper values.

namespace qss {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

inline int signed_kx(int i, int n) { return i <= n / 2 ? i : i - n; }
inline double pack_weight(int jh, int n) {
  return (jh == 0 || 2 * jh == n) ? 1.0 : 2.0;
}

/// Each member's scalar evaluated on its relative b x b cell-center grid.
std::vector<GridField> member_grids(const LocalFieldSet& set, double t,
                                    int b) {
  std::vector<GridField> grids;
  grids.reserve(set.members());
  for (int m = 0; m < set.members(); ++m) {
    const LocalField& f = set.field(m, t);
    GridField g = GridField::scalar(b);
    for (int ci = 0; ci < b; ++ci)
      for (int cj = 0; cj < b; ++cj)
        g.at(0, ci, cj) = f.scalar({(ci + 0.5) / b, (cj + 0.5) / b});
    grids.push_back(std::move(g));
  }
  return grids;
}

/// Scatter pre-evaluated member grids into the level's tiling. The scalar
/// carries no amplitude factor under the tile scaling, so the assembled
/// value in a tile is its block's relative-grid value verbatim; this
/// reproduces the full assembly's scalar component entry for entry.
GridField scatter_scalar(const Tiling& tiling,
                         const std::vector<GridField>& grids, int resolution) {
  const int side = tiling.side();
  if (resolution % side != 0)
    throw std::invalid_argument(
        "scatter_scalar: resolution must be a multiple of the tiles per side");
  const int b = resolution / side;
  for (const GridField& g : grids)
    if (g.resolution() != b)
      throw std::invalid_argument("scatter_scalar: member grid size mismatch");

  GridField out = GridField::scalar(resolution);
  for (int qi = 0; qi < side; ++qi)
    for (int qj = 0; qj < side; ++qj) {
      const GridField& g = grids[tiling.block_at(qi, qj) - 1];
      for (int ci = 0; ci < b; ++ci)
        for (int cj = 0; cj < b; ++cj)
          out.at(0, qi * b + ci, qj * b + cj) = g.at(0, ci, cj);
    }
  return out;
}

/// Directly assembled scalar of one level, transformed. Resolutions are
/// fixed per level: generous oversampling at the coarse levels, and at the
/// deepest direct level the largest transform-friendly multiple of the tile
/// count that memory allows (block sampling stays above twice the spectral
/// peak of the tube profile).
int direct_resolution(int level) {
  switch (level) {
    case 0:
      return 2048;
    case 1:
      return 2500;
    case 2:
      return 8000;
    default:
      throw std::invalid_argument(
          "direct_resolution: direct transforms cover levels 0..2 only");
  }
}

SpectralField direct_spectrum(const LocalFieldSet& set, double t, int level) {
  const Tiling tiling = Tiling::build(level, set.members());
  const int resolution = direct_resolution(level);
  const std::vector<GridField> grids =
      member_grids(set, t, resolution / tiling.side());
  const GridField field = scatter_scalar(tiling, grids, resolution);
  return SpectralField::forward(field);
}

/// Estimated squared norm for weight W(|k|), |k| in assembled (physical)
/// frequency units, accumulated over the member-spectrum grid. The
/// diagonal's incoherent count of the lattice points is exactly its own
/// value over lambda^2, removed before the coherent lattice term is added.
double estimate_sq(const std::vector<SpectralField>& spectra,
                   const std::vector<int>& mults, double lambda,
                   const std::function<double(double)>& weight) {
  const int b = spectra.front().resolution();
  const int ld = b / 2 + 1;
  double diag = 0.0, lines = 0.0;
  for (int i = 0; i < b; ++i) {
    const int kx = signed_kx(i, b);
    for (int jh = 0; jh < ld; ++jh) {
      if (kx == 0 && jh == 0) continue;
      const double w =
          pack_weight(jh, b) * weight(lambda * std::hypot(double(kx), jh));
      if (w == 0.0) continue;
      double power = 0.0;
      std::complex<double> coherent(0.0, 0.0);
      for (std::size_t m = 0; m < spectra.size(); ++m) {
        const std::complex<double> c = spectra[m].at(i, jh);
        power += mults[m] * std::norm(c);
        coherent += double(mults[m]) * c;
      }
      diag += w * power;
      lines += w * std::norm(coherent);
    }
  }
  const double l2 = lambda * lambda;
  // diagonal lambda^2 * lambda^-4, its lattice-point share lambda^-4,
  // coherent lattice lambda^-4
  return diag / l2 - diag / (l2 * l2) + lines / (l2 * l2);
}

/// Member spectra at the fixed block resolution used by the estimator.
constexpr int kBlockSpectrumResolution = 1024;

std::vector<SpectralField> member_spectra(const std::vector<GridField>& grids) {
  std::vector<SpectralField> spectra;
  spectra.reserve(grids.size());
  for (const GridField& g : grids) spectra.push_back(SpectralField::forward(g));
  return spectra;
}

double least_squares_slope(const std::vector<double>& xs,
                           const std::vector<double>& ys) {
  const std::size_t n = xs.size();
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    num += (xs[i] - mx) * (ys[i] - my);
    den += (xs[i] - mx) * (xs[i] - mx);
  }
  return num / den;
}

double inverse_gradient_weight(double k) { return 1.0 / (kTwoPi * kTwoPi * k * k); }

}  // namespace

MixNormSweep mix_norm_sweep(const LocalFieldSet& set, double t, int n_max,
                            int direct_max_level) {
  if (n_max < 1 || n_max > 4)
    throw std::invalid_argument("mix_norm_sweep: n_max must be in [1, 4]");
  const int direct_max = std::min({direct_max_level, 2, n_max});
  if (direct_max < 0)
    throw std::invalid_argument(
        "mix_norm_sweep: at least level 0 must be computed directly");

  // Member grids at the block-spectrum resolution double as the level-0
  // relative grids (level 0 tiles the square 2 x 2 at resolution 2048).
  const std::vector<GridField> grids =
      member_grids(set, t, kBlockSpectrumResolution);
  const std::vector<SpectralField> spectra = member_spectra(grids);

  MixNormSweep sweep;
  sweep.estimator_ratio.assign(direct_max + 1, 0.0);
  std::vector<double> levels, logs;

  for (int n = 0; n <= n_max; ++n) {
    const double lambda = 2.0 * std::pow(5.0, n);
    const std::vector<int> mults =
        Tiling::build(n, set.members()).multiplicities();
    const double raw = std::sqrt(
        estimate_sq(spectra, mults, lambda, inverse_gradient_weight));

    MixNormPoint point;
    point.level = n;
    point.raw_estimate = raw;
    if (n <= direct_max) {
      if (n == 0) {
        const Tiling tiling = Tiling::build(0, set.members());
        point.value = h_minus1_norm(SpectralField::forward(
            scatter_scalar(tiling, grids, direct_resolution(0))));
      } else {
        point.value = h_minus1_norm(direct_spectrum(set, t, n));
      }
      sweep.estimator_ratio[n] = point.value / raw;
    } else {
      point.estimated = true;
      point.value = raw * sweep.estimator_ratio[direct_max];
    }
    sweep.points.push_back(point);
    levels.push_back(double(n));
    logs.push_back(std::log(point.value) / std::log(5.0));
  }

  sweep.slope = least_squares_slope(levels, logs);
  return sweep;
}

double calibrate_concentration_cutoff(const LocalFieldSet& set, double t,
                                      double mass_threshold) {
  if (!(mass_threshold > 0.0) || !(mass_threshold < 1.0))
    throw std::invalid_argument(
        "calibrate_concentration_cutoff: threshold must be in (0, 1)");

  const SpectralField f = direct_spectrum(set, t, 1);
  const double total = f.l2norm();
  // Masses are monotone in the cutoff: walk the coefficients bucketed by
  // integer radius and find the largest cutoff still at or below threshold.
  const int n = f.resolution();
  const int max_radius = int(std::ceil(std::numbers::sqrt2 * (n / 2))) + 1;
  std::vector<double> bucket(std::size_t(max_radius) + 1, 0.0);
  for (int i = 0; i < n; ++i) {
    const int kx = signed_kx(i, n);
    for (int jh = 0; jh < n / 2 + 1; ++jh) {
      if (kx == 0 && jh == 0) continue;
      const int r = int(std::ceil(std::hypot(double(kx), jh)));
      bucket[r] += pack_weight(jh, n) * std::norm(f.at(i, jh));
    }
  }
  const double limit =
      mass_threshold * mass_threshold * total * total;
  double cumulative = 0.0;
  int best = 0;
  for (int r = 1; r <= max_radius; ++r) {
    cumulative += bucket[r];
    if (cumulative <= limit)
      best = r;
    else
      break;
  }
  if (best == 0)
    throw std::runtime_error(
        "calibrate_concentration_cutoff: no cutoff satisfies the threshold");
  // The scan ran at level 1, whose cutoff is 5 Lambda.
  return double(best) / 5.0;
}

double concentration_mass(const LocalFieldSet& set, double t, int level,
                          double lambda_cutoff) {
  if (level < 0 || level > 3)
    throw std::invalid_argument("concentration_mass: level must be in [0, 3]");
  if (!(lambda_cutoff > 0.0))
    throw std::invalid_argument("concentration_mass: cutoff must be positive");
  const double cutoff = lambda_cutoff * std::pow(5.0, level);

  if (level <= 2) return low_freq_mass(direct_spectrum(set, t, level), cutoff);

  const std::vector<SpectralField> spectra =
      member_spectra(member_grids(set, t, kBlockSpectrumResolution));
  const std::vector<int> mults =
      Tiling::build(level, set.members()).multiplicities();
  const double lambda = 2.0 * std::pow(5.0, level);
  const auto indicator = [cutoff](double k) {
    return k <= cutoff ? 1.0 : 0.0;
  };
  return std::sqrt(estimate_sq(spectra, mults, lambda, indicator));
}

}  // namespace qss
