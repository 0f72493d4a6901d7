#include "qss/tiling.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <utility>

#include "qss/assembly.hpp"
#include "qss/curve.hpp"
#include "qss/tube_map.hpp"

namespace qss {

namespace {
constexpr double kPi = std::numbers::pi;
}

// ===========================================================================
// Tiling
// ===========================================================================

namespace {

/// Serpentine position of (i, j) in an m x m grid: bottom row first, even
/// rows left-to-right, odd rows right-to-left.
int serpentine_index(int i, int j, int m) {
  return j * m + (j % 2 == 0 ? i : m - 1 - i);
}

}  // namespace

Tiling::Tiling(int level, int side, int blocks, std::vector<int> assign)
    : level_(level), side_(side), blocks_(blocks), assign_(std::move(assign)) {}

std::vector<std::pair<int, int>> Tiling::traversal_order(int m) {
  std::vector<std::pair<int, int>> order(std::size_t(m) * m);
  for (int j = 0; j < m; ++j)
    for (int i = 0; i < m; ++i)
      order[serpentine_index(i, j, m)] = {i, j};
  return order;
}

Tiling Tiling::build(int level, int blocks) {
  if (level < 0 || level > 4)
    throw std::invalid_argument("Tiling::build: level must lie in [0, 4]");
  if (blocks < 1)
    throw std::invalid_argument("Tiling::build: need at least one block");

  // Level 0: the 2x2 squares, serpentine order, cyclic blocks.
  int side = 2;
  std::vector<int> assign(4);
  for (int j = 0; j < 2; ++j)
    for (int i = 0; i < 2; ++i)
      assign[std::size_t(i) * side + j] = serpentine_index(i, j, 2) % blocks + 1;

  // Refine: children of a block-i square get blocks cyclically from i along
  // the serpentine traversal of the 5x5 subdivision.
  for (int l = 0; l < level; ++l) {
    const int fine = side * 5;
    std::vector<int> next(std::size_t(fine) * fine);
    for (int qi = 0; qi < fine; ++qi) {
      for (int qj = 0; qj < fine; ++qj) {
        const int parent = assign[std::size_t(qi / 5) * side + qj / 5];
        const int p = serpentine_index(qi % 5, qj % 5, 5);
        next[std::size_t(qi) * fine + qj] = (parent - 1 + p) % blocks + 1;
      }
    }
    side = fine;
    assign = std::move(next);
  }
  return Tiling(level, side, blocks, std::move(assign));
}

Tiling Tiling::build_scrambled(int level, int blocks, std::uint64_t seed) {
  Tiling t = build(level, blocks);
  Rng rng(seed);
  for (int k = int(t.assign_.size()) - 1; k > 0; --k)
    std::swap(t.assign_[k], t.assign_[rng.uniform_int(k + 1)]);
  return t;
}

int Tiling::block_at(int qi, int qj) const {
  if (qi < 0 || qi >= side_ || qj < 0 || qj >= side_)
    throw std::invalid_argument("Tiling::block_at: tile index out of range");
  return assign_[std::size_t(qi) * side_ + qj];
}

Vec2 Tiling::corner(int qi, int qj) const {
  if (qi < 0 || qi >= side_ || qj < 0 || qj >= side_)
    throw std::invalid_argument("Tiling::corner: tile index out of range");
  return {double(qi) / side_, double(qj) / side_};
}

std::vector<int> Tiling::multiplicities() const {
  std::vector<int> m(blocks_, 0);
  for (int b : assign_) ++m[b - 1];
  return m;
}

// ===========================================================================
// Assembly
// ===========================================================================

AssembledFields assemble(const Tiling& tiling, const LocalFieldSet& set,
                         double t, int resolution) {
  if (tiling.blocks() != set.members())
    throw std::invalid_argument(
        "assemble: tiling block count differs from family member count");
  if (resolution % tiling.side() != 0)
    throw std::invalid_argument(
        "assemble: resolution must be a multiple of the tiles per side");

  const int side = tiling.side();
  const int b = resolution / side;
  const double inv_lambda = 1.0 / side;

  // Every tile's cell centers occupy the same relative positions in block
  // coordinates, so each member is evaluated once on that relative grid.
  const int members = set.members();
  std::vector<std::vector<double>> bs(members);
  std::vector<std::vector<Vec2>> bv(members);
  for (int m = 0; m < members; ++m) {
    const LocalField& f = set.field(m, t);
    bs[m].resize(std::size_t(b) * b);
    bv[m].resize(std::size_t(b) * b);
    for (int ci = 0; ci < b; ++ci) {
      for (int cj = 0; cj < b; ++cj) {
        const Vec2 x{(ci + 0.5) / b, (cj + 0.5) / b};
        bs[m][std::size_t(ci) * b + cj] = f.scalar(x);
        bv[m][std::size_t(ci) * b + cj] = f.velocity(x);
      }
    }
  }

  AssembledFields out{GridField::scalar(resolution),
                      GridField::vector2(resolution)};
  for (int qi = 0; qi < side; ++qi) {
    for (int qj = 0; qj < side; ++qj) {
      const int m = tiling.block_at(qi, qj) - 1;
      for (int ci = 0; ci < b; ++ci) {
        for (int cj = 0; cj < b; ++cj) {
          const std::size_t src = std::size_t(ci) * b + cj;
          const int gi = qi * b + ci, gj = qj * b + cj;
          out.scalar_field.at(0, gi, gj) = bs[m][src];
          out.velocity_field.at(0, gi, gj) = bv[m][src].x * inv_lambda;
          out.velocity_field.at(1, gi, gj) = bv[m][src].y * inv_lambda;
        }
      }
    }
  }
  return out;
}

// ===========================================================================
// Patching check
// ===========================================================================

namespace {

/// Periodic bilinear sample of cell-centered data at position x.
double bilinear(const GridField& g, Vec2 x) {
  const int n = g.resolution();
  const double u = x.x * n - 0.5, v = x.y * n - 0.5;
  const int i0 = int(std::floor(u)), j0 = int(std::floor(v));
  const double fu = u - i0, fv = v - j0;
  const auto wrap_idx = [n](int k) { return ((k % n) + n) % n; };
  const int i1 = wrap_idx(i0 + 1), j1 = wrap_idx(j0 + 1);
  const int iw = wrap_idx(i0), jw = wrap_idx(j0);
  return (1 - fu) * ((1 - fv) * g.at(0, iw, jw) + fv * g.at(0, iw, j1)) +
         fu * ((1 - fv) * g.at(0, i1, jw) + fv * g.at(0, i1, j1));
}

}  // namespace

double recursion_mismatch(const GridField& a, const GridField& b) {
  if (a.components() != 1 || b.components() != 1)
    throw std::invalid_argument("recursion_mismatch: scalar fields expected");
  const bool a_finer = a.resolution() >= b.resolution();
  const GridField& fine = a_finer ? a : b;
  const GridField& coarse = a_finer ? b : a;
  if (fine.resolution() % coarse.resolution() != 0)
    throw std::invalid_argument(
        "recursion_mismatch: one resolution must divide the other");

  const int n = fine.resolution();
  double sum = 0.0;
  if (coarse.resolution() == n) {
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        const double d = fine.at(0, i, j) - coarse.at(0, i, j);
        sum += d * d;
      }
  } else {
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        const double d = fine.at(0, i, j) - bilinear(coarse, fine.cell_centre(i, j));
        sum += d * d;
      }
  }
  return std::sqrt(sum) / n;
}

// ===========================================================================
// Block-level measurements
// ===========================================================================

namespace {

constexpr int kSupAxisSamples = 512;
constexpr int kSupFibreSamples = 96;
constexpr int kPairAxisSamples = 128;
constexpr int kPairFibreStarts = 24;
constexpr int kDyadicScales = 12;
constexpr int kRandomPairs = 8000;
constexpr int kAdvAxisSamples = 192;
constexpr int kAdvFibreSamples = 48;

/// Fourth-order centred difference of V along axis k at x, step h.
Vec2 velocity_derivative(const LocalField& f, Vec2 x, int axis, double h) {
  const Vec2 e = axis == 0 ? Vec2{1.0, 0.0} : Vec2{0.0, 1.0};
  const Vec2 p1 = f.velocity(x + h * e), m1 = f.velocity(x - h * e);
  const Vec2 p2 = f.velocity(x + 2 * h * e), m2 = f.velocity(x - 2 * h * e);
  return (8.0 * (p1 - m1) - (p2 - m2)) * (1.0 / (12.0 * h));
}

}  // namespace

BlockNorms measure_block_norms(const LocalFieldSet& set, int member, double t,
                               double alpha) {
  const LocalField& f = set.field(member, t);
  const TubeMap& chart = f.chart();
  const double L = chart.curve().length;
  const double r = f.tube_radius();
  const bool closed = chart.curve().closed;
  BlockNorms out;

  const auto axis_s = [&](int k, int count) {
    return closed ? L * k / count : L * k / (count - 1);
  };

  // ---- sup norms over a dense chart lattice --------------------------------
  for (int k = 0; k < kSupAxisSamples; ++k) {
    const double s = axis_s(k, kSupAxisSamples);
    for (int m = 0; m < kSupFibreSamples; ++m) {
      const double y = r * (-0.95 + 1.9 * m / (kSupFibreSamples - 1));
      out.sup_velocity = std::max(out.sup_velocity, f.velocity_chart(s, y).norm());
    }
    for (int m = 0; m < 65; ++m) {
      const double y = r * (-0.5 + 1.0 * m / 64);
      const Vec2 g = f.scalar_gradient(chart.map(s, y));
      out.sup_grad_scalar = std::max(out.sup_grad_scalar, g.norm());
    }
  }

  // ---- velocity Holder seminorm: dyadic pairs ------------------------------
  // (a) along fibres, (b) along the axis direction, (c) randomly oriented
  // pairs in physical space. Distances are measured between the actual
  // mapped positions, not in chart coordinates.
  for (int k = 0; k < kPairAxisSamples; ++k) {
    const double s = axis_s(k, kPairAxisSamples);
    for (int d = 0; d < kDyadicScales; ++d) {
      const double delta = 1.9 * r * std::pow(0.5, d);
      for (int m = 0; m < kPairFibreStarts; ++m) {
        const double y0 = -0.95 * r + (1.9 * r - delta) * m / (kPairFibreStarts - 1);
        const double y1 = y0 + delta;
        const double dist = (chart.map(s, y1) - chart.map(s, y0)).norm();
        if (dist <= 0.0) continue;
        const double dv =
            (f.velocity_chart(s, y1) - f.velocity_chart(s, y0)).norm();
        out.holder_velocity =
            std::max(out.holder_velocity, dv / std::pow(dist, alpha));
      }
    }
  }
  for (int m = 0; m < 16; ++m) {
    const double y = r * (-0.9 + 1.8 * m / 15);
    for (int d = 1; d <= kDyadicScales; ++d) {
      const double ds = L * std::pow(0.5, d);
      for (int k = 0; k < kPairAxisSamples; ++k) {
        double s0 = axis_s(k, kPairAxisSamples), s1 = s0 + ds;
        if (!closed && s1 > L) continue;
        const double dist = (chart.map(s1, y) - chart.map(s0, y)).norm();
        if (dist <= 0.0) continue;
        const double dv =
            (f.velocity_chart(s1, y) - f.velocity_chart(s0, y)).norm();
        out.holder_velocity =
            std::max(out.holder_velocity, dv / std::pow(dist, alpha));
      }
    }
  }
  Rng rng(0x51a9u + std::uint64_t(member));
  for (int k = 0; k < kRandomPairs; ++k) {
    const double s = rng.uniform(0.0, L);
    const double y = rng.uniform(-r, r);
    const Vec2 x = chart.map(s, y);
    const double phi = rng.uniform(0.0, 2.0 * kPi);
    const double delta = 3.0 * r * std::pow(0.5, rng.uniform_int(kDyadicScales + 1));
    const Vec2 x2 = x + delta * Vec2{std::cos(phi), std::sin(phi)};
    const double dv = (f.velocity(x2) - f.velocity(x)).norm();
    out.holder_velocity =
        std::max(out.holder_velocity, dv / std::pow(delta, alpha));
  }

  // ---- advective field W = (V.grad)V ---------------------------------------
  // Sampled on a chart lattice; fourth-order differencing of V in physical
  // coordinates with a step far below the roll-off layer width.
  const double h = r / 1000.0;
  std::vector<Vec2> w(std::size_t(kAdvAxisSamples) * kAdvFibreSamples);
  std::vector<Vec2> pos(w.size());
  for (int k = 0; k < kAdvAxisSamples; ++k) {
    const double s = axis_s(k, kAdvAxisSamples);
    for (int m = 0; m < kAdvFibreSamples; ++m) {
      const double y = r * (-0.95 + 1.9 * m / (kAdvFibreSamples - 1));
      const Vec2 x = chart.map(s, y);
      const Vec2 v = f.velocity_chart(s, y);
      const Vec2 dvx = velocity_derivative(f, x, 0, h);
      const Vec2 dvy = velocity_derivative(f, x, 1, h);
      const Vec2 adv = v.x * dvx + v.y * dvy;
      const std::size_t idx = std::size_t(k) * kAdvFibreSamples + m;
      w[idx] = adv;
      pos[idx] = x;
      out.sup_advective = std::max(out.sup_advective, adv.norm());
    }
  }
  const auto adv_pair = [&](std::size_t a, std::size_t bidx) {
    const double dist = (pos[a] - pos[bidx]).norm();
    if (dist <= 0.0) return;
    out.holder_advective = std::max(
        out.holder_advective, (w[a] - w[bidx]).norm() / std::pow(dist, alpha));
  };
  for (int k = 0; k < kAdvAxisSamples; ++k) {
    for (int m = 0; m < kAdvFibreSamples; ++m) {
      const std::size_t idx = std::size_t(k) * kAdvFibreSamples + m;
      for (int gap : {1, 2, 4, 8, 16, 32}) {
        if (m + gap < kAdvFibreSamples) adv_pair(idx, idx + gap);
        if (k + gap < kAdvAxisSamples)
          adv_pair(idx, idx + std::size_t(gap) * kAdvFibreSamples);
      }
    }
  }

  // ---- distance from the tube to the block boundary ------------------------
  // The chart reaches at most ~1.2 r from the curve (focal-margin bound on
  // the offset), so a 1.25 r inflation of the sample bounding box contains
  // every point where either field can be nonzero.
  double lo_x = 1.0, hi_x = 0.0, lo_y = 1.0, hi_y = 0.0;
  for (const Vec2& p : chart.curve().pts) {
    lo_x = std::min(lo_x, p.x);
    hi_x = std::max(hi_x, p.x);
    lo_y = std::min(lo_y, p.y);
    hi_y = std::max(hi_y, p.y);
  }
  const double reach = 1.25 * r;
  out.support_margin = std::max(
      0.0, std::min({lo_x - reach, lo_y - reach, 1.0 - hi_x - reach,
                     1.0 - hi_y - reach}));
  return out;
}

BlockIntegrals block_integrals(const LocalField& field) {
  const double L = field.chart().curve().length;
  const double r = field.tube_radius();
  const GaussRule rule = gauss_legendre(64);
  // The scalar depends on the fibre coordinate only and the chart has unit
  // Jacobian, so both integrals reduce to a fibre quadrature times the axis
  // length. Nodes map [-1, 1] onto the support [-r/2, r/2].
  double mean = 0.0, l2sq = 0.0;
  for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
    const double y = 0.5 * r * rule.nodes[k];
    const double wgt = 0.5 * r * rule.weights[k];
    const double v = field.scalar_chart(y);
    mean += wgt * v;
    l2sq += wgt * v * v;
  }
  return {mean * L, l2sq * L};
}

double min_intermember_gap(const CurveFamily& family, double t) {
  const int n = family.members();
  if (n < 2) return 1.0;
  double min_d2 = 2.0;
  std::vector<Curve> curves;
  curves.reserve(n);
  for (int m = 0; m < n; ++m) curves.push_back(family.at(m, t));
  for (int a = 0; a < n; ++a) {
    for (int b = a + 1; b < n; ++b) {
      for (const Vec2& p : curves[a].pts) {
        for (const Vec2& q : curves[b].pts) {
          const double dx = p.x - q.x, dy = p.y - q.y;
          min_d2 = std::min(min_d2, dx * dx + dy * dy);
        }
      }
    }
  }
  return std::sqrt(min_d2) - 2.0 * family.tube_radius();
}

// ===========================================================================
// Scaling diagnostics
// ===========================================================================

ScalingDiagnostics scaling_diagnostics(const LocalFieldSet& set, int n_max,
                                       double alpha, double t) {
  if (n_max < 0 || n_max > 4)
    throw std::invalid_argument("scaling_diagnostics: n_max must lie in [0, 4]");

  const int members = set.members();
  std::vector<BlockNorms> norms(members);
  std::vector<BlockIntegrals> ints(members);
  for (int m = 0; m < members; ++m) {
    norms[m] = measure_block_norms(set, m, t, alpha);
    ints[m] = block_integrals(set.field(m, t));
  }

  ScalingDiagnostics diag;
  diag.within_tile_dominates = true;
  std::vector<double> ns, grad_vals, v_vals, w_vals;
  for (int n = 0; n <= n_max; ++n) {
    const Tiling tiling = Tiling::build(n, members);
    const std::vector<int> mult = tiling.multiplicities();
    const double lambda = tiling.side();
    const double tiles = double(tiling.side()) * tiling.side();

    // Per-level extrema over the blocks that actually appear, and the
    // multiplicity-weighted integrals.
    double sup_v = 0.0, hol_v = 0.0, sup_g = 0.0, sup_w = 0.0, hol_w = 0.0;
    double margin = 1.0, mean = 0.0, l2sq = 0.0;
    for (int m = 0; m < members; ++m) {
      if (mult[m] == 0) continue;
      sup_v = std::max(sup_v, norms[m].sup_velocity);
      hol_v = std::max(hol_v, norms[m].holder_velocity);
      sup_g = std::max(sup_g, norms[m].sup_grad_scalar);
      sup_w = std::max(sup_w, norms[m].sup_advective);
      hol_w = std::max(hol_w, norms[m].holder_advective);
      margin = std::min(margin, norms[m].support_margin);
      mean += mult[m] * ints[m].mean;
      l2sq += mult[m] * ints[m].l2sq;
    }

    ScalingRow row;
    row.level = n;
    row.sup_grad_rho = lambda * sup_g;
    const double shrink = std::pow(lambda, alpha - 1.0);
    row.velocity_norm = sup_v / lambda + shrink * hol_v;
    row.advective_norm = sup_w / lambda + shrink * hol_w;
    // Any pair with its points in two distinct tiles is separated by at
    // least twice the scaled support margin, bounding its quotient by the
    // triangle inequality; the bound carries the same lambda power, so
    // domination is level-independent.
    row.velocity_cross_bound =
        shrink * 2.0 * sup_v / std::pow(2.0 * margin, alpha);
    row.advective_cross_bound =
        shrink * 2.0 * sup_w / std::pow(2.0 * margin, alpha);
    row.mean_rho = mean / tiles;
    row.l2sq_rho = l2sq / tiles;
    diag.rows.push_back(row);

    if (shrink * hol_v < row.velocity_cross_bound ||
        shrink * hol_w < row.advective_cross_bound)
      diag.within_tile_dominates = false;

    ns.push_back(double(n));
    if (row.sup_grad_rho <= 0.0 || row.velocity_norm <= 0.0 ||
        row.advective_norm <= 0.0)
      throw std::runtime_error(
          "scaling_diagnostics: nonpositive norm, cannot fit exponents");
    const double ln5 = std::log(5.0);
    grad_vals.push_back(std::log(row.sup_grad_rho) / ln5);
    v_vals.push_back(std::log(row.velocity_norm) / ln5);
    w_vals.push_back(std::log(row.advective_norm) / ln5);
  }

  diag.slope_grad_rho = ls_slope(ns, grad_vals);
  diag.slope_velocity = ls_slope(ns, v_vals);
  diag.slope_advective = ls_slope(ns, w_vals);
  return diag;
}

}  // namespace qss
