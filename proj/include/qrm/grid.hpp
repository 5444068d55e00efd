#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "qrm/bitgrid.hpp"
#include "qrm/types.hpp"

namespace qrm {

/// Centered square region of side T that the schedule must fill.
/// Occupies rows and columns [W/2 - T/2, W/2 + T/2). T must be even and
/// 0 < T <= W so the region splits into four T/2 x T/2 quadrant corners.
struct TargetRegion {
  int side = 0;

  friend bool operator==(const TargetRegion&, const TargetRegion&) = default;

  int quadrant_side() const { return side / 2; }

  int lo(int grid_side) const { return grid_side / 2 - side / 2; }
  int hi(int grid_side) const { return grid_side / 2 + side / 2; } // exclusive

  bool contains(int grid_side, SiteCoord s) const {
    return s.row >= lo(grid_side) && s.row < hi(grid_side) && s.col >= lo(grid_side) &&
           s.col < hi(grid_side);
  }
};

inline void validate_grid_side(int side) {
  if (side <= 0 || side % 2 != 0) {
    throw std::invalid_argument("grid side must be a positive even number, got " +
                                std::to_string(side));
  }
}

inline void validate_target(int grid_side, TargetRegion target) {
  validate_grid_side(grid_side);
  if (target.side <= 0 || target.side % 2 != 0 || target.side > grid_side) {
    throw std::invalid_argument("target side must be even and in (0, W], got " +
                                std::to_string(target.side));
  }
}

inline std::size_t target_popcount(const BitGrid& grid, TargetRegion target) {
  std::size_t n = 0;
  for (int r = target.lo(grid.side()); r < target.hi(grid.side()); ++r) {
    for (int c = target.lo(grid.side()); c < target.hi(grid.side()); ++c) {
      n += grid.get(r, c) ? 1 : 0;
    }
  }
  return n;
}

inline bool target_full(const BitGrid& grid, TargetRegion target) {
  const auto t = static_cast<std::size_t>(target.side) * static_cast<std::size_t>(target.side);
  return target_popcount(grid, target) == t;
}

inline std::vector<SiteCoord> target_holes(const BitGrid& grid, TargetRegion target) {
  std::vector<SiteCoord> holes;
  for (int r = target.lo(grid.side()); r < target.hi(grid.side()); ++r) {
    for (int c = target.lo(grid.side()); c < target.hi(grid.side()); ++c) {
      if (!grid.get(r, c)) {
        holes.push_back({r, c});
      }
    }
  }
  return holes;
}

/// Stochastic loading parameters. The generator is pinned to SplitMix64 with
/// draws consumed in row-major site order, so any implementation with the
/// same (W, p, seed) reproduces the exact same grid.
struct LoadConfig {
  double fill_probability = 0.5;
  std::uint64_t seed = 0;
};

/// SplitMix64 step (Vigna's constants).
inline std::uint64_t splitmix64_next(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Uniform double in [0,1) from the top 53 bits of a draw.
inline double splitmix64_unit(std::uint64_t& state) {
  return static_cast<double>(splitmix64_next(state) >> 11) * 0x1.0p-53;
}

/// Load a W x W grid where each site independently captures an atom with
/// probability p. One draw per site, row-major.
inline BitGrid random_load(int width, const LoadConfig& cfg) {
  validate_grid_side(width);
  if (cfg.fill_probability < 0.0 || cfg.fill_probability > 1.0) {
    throw std::invalid_argument("fill probability must lie in [0,1]");
  }
  BitGrid grid(width);
  std::uint64_t state = cfg.seed;
  for (int r = 0; r < width; ++r) {
    for (int c = 0; c < width; ++c) {
      if (splitmix64_unit(state) < cfg.fill_probability) {
        grid.set(r, c, true);
      }
    }
  }
  return grid;
}

// --- quadrant coordinate algebra ------------------------------------------
//
// Each quadrant is viewed through a flip that puts local (0,0) on the corner
// touching the array center, with local indices growing outward. Compressing
// toward local index 0 is then the same schedule for all four quadrants.

inline SiteCoord local_to_global(QuadrantId q, SiteCoord local, int grid_side) {
  validate_grid_side(grid_side);
  const int qw = grid_side / 2;
  if (local.row < 0 || local.row >= qw || local.col < 0 || local.col >= qw) {
    throw std::out_of_range("local site outside quadrant");
  }
  switch (q) {
  case QuadrantId::NW: return {qw - 1 - local.row, qw - 1 - local.col};
  case QuadrantId::NE: return {qw - 1 - local.row, qw + local.col};
  case QuadrantId::SW: return {qw + local.row, qw - 1 - local.col};
  default: return {qw + local.row, qw + local.col}; // SE
  }
}

inline QuadrantId quadrant_of(SiteCoord global, int grid_side) {
  validate_grid_side(grid_side);
  const int qw = grid_side / 2;
  if (global.row < 0 || global.row >= grid_side || global.col < 0 || global.col >= grid_side) {
    throw std::out_of_range("global site outside grid");
  }
  if (global.row < qw) {
    return global.col < qw ? QuadrantId::NW : QuadrantId::NE;
  }
  return global.col < qw ? QuadrantId::SW : QuadrantId::SE;
}

inline SiteCoord global_to_local(SiteCoord global, int grid_side) {
  const int qw = grid_side / 2;
  switch (quadrant_of(global, grid_side)) {
  case QuadrantId::NW: return {qw - 1 - global.row, qw - 1 - global.col};
  case QuadrantId::NE: return {qw - 1 - global.row, global.col - qw};
  case QuadrantId::SW: return {global.row - qw, qw - 1 - global.col};
  default: return {global.row - qw, global.col - qw}; // SE
  }
}

/// Flipped Q_w x Q_w view of one quadrant; bits(0,0) is the site adjacent to
/// the array center.
struct LocalQuadrant {
  QuadrantId quadrant = QuadrantId::NW;
  BitGrid bits;

  int side() const { return bits.side(); }
};

inline std::array<LocalQuadrant, 4> split_quadrants(const BitGrid& grid) {
  validate_grid_side(grid.side());
  const int qw = grid.side() / 2;
  std::array<LocalQuadrant, 4> quads;
  for (int qi = 0; qi < 4; ++qi) {
    const QuadrantId q = kAllQuadrants[qi];
    LocalQuadrant lq{q, BitGrid(qw)};
    for (int i = 0; i < qw; ++i) {
      for (int j = 0; j < qw; ++j) {
        lq.bits.set(i, j, grid.get(local_to_global(q, {i, j}, grid.side())));
      }
    }
    quads[qi] = std::move(lq);
  }
  return quads;
}

/// Inverse of split_quadrants.
inline BitGrid merge_quadrants(const std::array<LocalQuadrant, 4>& quads) {
  const int qw = quads[0].side();
  BitGrid grid(2 * qw);
  for (const auto& lq : quads) {
    if (lq.side() != qw) {
      throw std::invalid_argument("quadrants have mismatched sides");
    }
    for (int i = 0; i < qw; ++i) {
      for (int j = 0; j < qw; ++j) {
        grid.set(local_to_global(lq.quadrant, {i, j}, grid.side()), lq.bits.get(i, j));
      }
    }
  }
  return grid;
}

// --- feasibility -----------------------------------------------------------

struct QuadrantFeasibility {
  QuadrantId quadrant = QuadrantId::NW;
  std::size_t available = 0; // atoms loaded into this quadrant
  std::size_t required = 0;  // (T/2)^2 sites to fill
  bool feasible = false;
};

struct FeasibilityReport {
  std::array<QuadrantFeasibility, 4> quadrants;
  bool feasible = false; // all four quadrants can be filled independently
};

/// Supply check for independent per-quadrant filling: each quadrant must hold
/// at least (T/2)^2 atoms. Necessary, not sufficient — row/column shifts
/// cannot reach every arrangement.
inline FeasibilityReport feasibility(const BitGrid& grid, TargetRegion target) {
  validate_target(grid.side(), target);
  const auto quads = split_quadrants(grid);
  const auto tq = static_cast<std::size_t>(target.quadrant_side());
  FeasibilityReport report;
  report.feasible = true;
  for (int qi = 0; qi < 4; ++qi) {
    auto& qf = report.quadrants[qi];
    qf.quadrant = quads[qi].quadrant;
    qf.available = quads[qi].bits.popcount();
    qf.required = tq * tq;
    qf.feasible = qf.available >= qf.required;
    report.feasible = report.feasible && qf.feasible;
  }
  return report;
}

} // namespace qrm
