#pragma once
/// 5-adic tilings of the unit square with a deterministic block assignment.
///
/// A level-n tiling partitions [0,1]^2 into (2*5^n)^2 congruent squares whose
/// lower-left corners sit on the (2*5^n)^{-1} lattice. Every square carries a
/// block index in {1..N} chosen by a fixed rule: the four level-0 squares get
/// blocks 1..4 in serpentine order, and when a square of block i subdivides
/// into 5x5 children, the children receive blocks cyclically starting from i
/// along the serpentine traversal of the 5x5 grid. The rule is total,
/// deterministic, and keeps the block multiplicities balanced (spread <= 1
/// from level 1 on).

#include <array>
#include <cstdint>
#include <utility>
#include <vector>

#include "qss/numerics.hpp"

namespace qss {

class Tiling {
 public:
  /// Deterministic serpentine-cyclic assignment. Throws std::invalid_argument
  /// for level outside [0, 4] (the supported desk-scale range) or blocks < 1.
  static Tiling build(int level, int blocks);

  /// Same tile geometry with the assignment shuffled by a seeded generator;
  /// used as a negative control for patching detectors.
  static Tiling build_scrambled(int level, int blocks, std::uint64_t seed);

  /// The serpentine traversal of an m x m grid as explicit (i, j) pairs,
  /// bottom row first, alternating direction per row.
  static std::vector<std::pair<int, int>> traversal_order(int m);

  int level() const { return level_; }
  /// Squares per side, 2 * 5^level.
  int side() const { return side_; }
  int blocks() const { return blocks_; }

  /// Block index in {1..blocks} of the square in column qi, row qj.
  int block_at(int qi, int qj) const;
  /// Lower-left corner r_Q of that square.
  Vec2 corner(int qi, int qj) const;

  /// Row-major assignment table, index qi * side + qj.
  const std::vector<int>& assignment() const { return assign_; }
  /// Occurrences of each block, index 0 = block 1.
  std::vector<int> multiplicities() const;

 private:
  Tiling(int level, int side, int blocks, std::vector<int> assign);

  int level_, side_, blocks_;
  std::vector<int> assign_;
};

}  // namespace qss
