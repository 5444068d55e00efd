#pragma once

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "qrm/bitgrid.hpp"
#include "qrm/grid.hpp"
#include "qrm/shift_kernel.hpp"
#include "qrm/types.hpp"

namespace qrm {

/// One hole-triggered shift inside a quadrant, in local coordinates.
/// The affected segment is everything strictly beyond the hole,
/// local indices [hole_pos+1, Q_w-1], which shifts one step toward index 0.
struct QuadrantCommand {
  QuadrantId quadrant = QuadrantId::NW;
  int iteration = 0;
  Axis axis = Axis::Rows;
  int line = 0;       // local row for a row pass, local column for a column pass
  int scan_index = 0; // original scan position of the hole
  int hole_pos = 0;   // hole position when the command executed
  bool moves_atoms = false;
};

/// Global segment of one line taking part in a merged move. For horizontal
/// moves `line` is a row and [lo,hi] a column range; for vertical moves
/// `line` is a column and [lo,hi] a row range. Every site in the range is
/// displaced one step; the site the leading atom steps onto is the hole
/// just past the range on the center side.
struct LineSegment {
  int line = 0;
  int lo = 0;
  int hi = 0; // inclusive

  friend bool operator==(const LineSegment&, const LineSegment&) = default;
};

/// Simultaneous one-step shift of several parallel lines in one direction.
struct MergedMove {
  int ordinal = 0;
  int iteration = 0;
  Axis axis = Axis::Rows;
  int scan_index = 0;
  Direction direction = Direction::East;
  int steps = 1;
  std::vector<LineSegment> lines; // sorted by line index

  friend bool operator==(const MergedMove&, const MergedMove&) = default;
};

/// Side a quadrant's shifts move from, after undoing its flip.
inline Direction command_direction(Axis axis, QuadrantId q) {
  if (axis == Axis::Rows) {
    return (q == QuadrantId::NW || q == QuadrantId::SW) ? Direction::East : Direction::West;
  }
  return (q == QuadrantId::NW || q == QuadrantId::NE) ? Direction::South : Direction::North;
}

namespace detail {

inline LineSegment to_global_segment(const QuadrantCommand& cmd, int grid_side) {
  const int qw = grid_side / 2;
  const bool flip_line = cmd.quadrant == QuadrantId::NW ||
                         (cmd.axis == Axis::Rows ? cmd.quadrant == QuadrantId::NE
                                                 : cmd.quadrant == QuadrantId::SW);
  const int line = flip_line ? qw - 1 - cmd.line : qw + cmd.line;
  // Local segment [hole+1, qw-1] mapped through the quadrant flip.
  const Direction dir = command_direction(cmd.axis, cmd.quadrant);
  if (dir == Direction::East || dir == Direction::South) {
    return {line, 0, qw - 2 - cmd.hole_pos};
  }
  return {line, qw + cmd.hole_pos + 1, 2 * qw - 1};
}

} // namespace detail

/// Merge the commands of one (iteration, axis, scan index) triple across
/// quadrants: both west-side quadrants shift East in a single move, both
/// east-side quadrants West, and analogously South/North for column passes.
/// Empty shifts are dropped here. Ordinals are left to the caller.
inline std::vector<MergedMove> merge_commands(const std::vector<QuadrantCommand>& commands,
                                              int grid_side) {
  validate_grid_side(grid_side);
  std::vector<MergedMove> out;
  if (commands.empty()) {
    return out;
  }
  const auto& first = commands.front();
  for (const auto& cmd : commands) {
    if (cmd.iteration != first.iteration || cmd.axis != first.axis ||
        cmd.scan_index != first.scan_index) {
      throw std::invalid_argument(
          "merge_commands requires a single (iteration, axis, scan index) triple");
    }
  }
  const Direction order[2] = {first.axis == Axis::Rows ? Direction::East : Direction::South,
                              first.axis == Axis::Rows ? Direction::West : Direction::North};
  for (const Direction dir : order) {
    MergedMove move{0, first.iteration, first.axis, first.scan_index, dir, 1, {}};
    for (const auto& cmd : commands) {
      if (!cmd.moves_atoms || command_direction(cmd.axis, cmd.quadrant) != dir) {
        continue;
      }
      move.lines.push_back(detail::to_global_segment(cmd, grid_side));
    }
    if (!move.lines.empty()) {
      std::sort(move.lines.begin(), move.lines.end(),
                [](const LineSegment& a, const LineSegment& b) { return a.line < b.line; });
      out.push_back(std::move(move));
    }
  }
  return out;
}

namespace detail {

/// Slide one segment of a merged move by one step. The leading atom must
/// land on an empty site (the hole the move was scheduled against).
inline void slide_segment(BitGrid& grid, Axis axis, Direction dir, const LineSegment& seg) {
  const auto get = [&](int along) {
    return axis == Axis::Rows ? grid.get(seg.line, along) : grid.get(along, seg.line);
  };
  const auto set = [&](int along, bool v) {
    if (axis == Axis::Rows) {
      grid.set(seg.line, along, v);
    } else {
      grid.set(along, seg.line, v);
    }
  };
  const bool toward_lo = dir == Direction::West || dir == Direction::North;
  const int lead = toward_lo ? seg.lo : seg.hi;
  const int dest = toward_lo ? seg.lo - 1 : seg.hi + 1;
  const int side = grid.side();
  if (seg.lo > seg.hi || seg.lo < 0 || seg.hi >= side) {
    throw std::invalid_argument("segment out of bounds");
  }
  if (get(lead)) {
    if (dest < 0 || dest >= side || get(dest)) {
      throw std::invalid_argument("segment slide lands on an occupied or missing site");
    }
    set(dest, true);
  }
  if (toward_lo) {
    for (int x = seg.lo; x < seg.hi; ++x) {
      set(x, get(x + 1));
    }
    set(seg.hi, false);
  } else {
    for (int x = seg.hi; x > seg.lo; --x) {
      set(x, get(x - 1));
    }
    set(seg.lo, false);
  }
}

} // namespace detail

/// Reference executor for merged moves on an occupancy grid. The physical
/// path (aod::lower + simulate) must agree with this; tests cross-check.
inline void apply_merged_move(BitGrid& grid, const MergedMove& move) {
  const bool horizontal = move.direction == Direction::East || move.direction == Direction::West;
  if (horizontal != (move.axis == Axis::Rows)) {
    throw std::invalid_argument("move direction does not match its axis");
  }
  if (move.steps != 1) {
    throw std::invalid_argument("merged moves are single-step");
  }
  for (const auto& seg : move.lines) {
    detail::slide_segment(grid, move.axis, move.direction, seg);
  }
}

// --- atom traces -------------------------------------------------------------

/// Journey of one atom: hops replay from origin to final, consecutive
/// same-direction steps coalesced.
struct AtomTrace {
  SiteCoord origin;
  std::vector<std::pair<Direction, int>> hops;
  SiteCoord final_site;

  friend bool operator==(const AtomTrace&, const AtomTrace&) = default;
};

/// Replay a merged schedule over the initial grid at atom granularity.
/// Throws if the schedule does not fit the grid (an atom would step onto an
/// occupied site or leave the array).
inline std::vector<AtomTrace> trace_atoms(const std::vector<MergedMove>& moves,
                                          const BitGrid& initial) {
  const int side = initial.side();
  std::vector<int> ids(initial.site_count(), -1);
  std::vector<AtomTrace> traces;
  for (int r = 0; r < side; ++r) {
    for (int c = 0; c < side; ++c) {
      if (initial.get(r, c)) {
        ids[static_cast<std::size_t>(r) * side + c] = static_cast<int>(traces.size());
        traces.push_back({{r, c}, {}, {r, c}});
      }
    }
  }
  const auto at = [&](SiteCoord s) -> int& {
    return ids[static_cast<std::size_t>(s.row) * side + s.col];
  };
  for (const auto& move : moves) {
    const int dr = row_delta(move.direction) * move.steps;
    const int dc = col_delta(move.direction) * move.steps;
    const bool toward_lo = move.direction == Direction::West || move.direction == Direction::North;
    for (const auto& seg : move.lines) {
      for (int k = 0; k <= seg.hi - seg.lo; ++k) {
        const int along = toward_lo ? seg.lo + k : seg.hi - k;
        const SiteCoord src = move.axis == Axis::Rows ? SiteCoord{seg.line, along}
                                                      : SiteCoord{along, seg.line};
        if (src.row < 0 || src.row >= side || src.col < 0 || src.col >= side) {
          throw std::invalid_argument("schedule segment outside the grid");
        }
        const int id = at(src);
        if (id < 0) {
          continue;
        }
        const SiteCoord dst{src.row + dr, src.col + dc};
        if (dst.row < 0 || dst.row >= side || dst.col < 0 || dst.col >= side || at(dst) >= 0) {
          throw std::invalid_argument("schedule does not match the grid at move " +
                                      std::to_string(move.ordinal));
        }
        at(dst) = id;
        at(src) = -1;
        auto& hops = traces[static_cast<std::size_t>(id)].hops;
        if (!hops.empty() && hops.back().first == move.direction) {
          hops.back().second += move.steps;
        } else {
          hops.emplace_back(move.direction, move.steps);
        }
        traces[static_cast<std::size_t>(id)].final_site = dst;
      }
    }
  }
  return traces;
}

// --- schedulers ---------------------------------------------------------------

enum class SEnPolicy : std::uint8_t {
  FullPack,   // all scan indices enabled: lines pack fully toward the center
  ColumnLimit // block commands at scan indices >= sen_limit
};

struct SchedulerConfig {
  int max_iterations = 0; // 0 picks Q_w
  SEnPolicy sen_policy = SEnPolicy::FullPack;
  int sen_limit = 0;
  bool fixpoint_early_stop = true;
};

enum class StopReason : std::uint8_t { TargetFilled, Fixpoint, MaxIterations };

constexpr const char* stop_reason_name(StopReason r) {
  switch (r) {
  case StopReason::TargetFilled: return "target-filled";
  case StopReason::Fixpoint: return "fixpoint";
  default: return "max-iterations";
  }
}

struct ScheduleResult {
  std::vector<MergedMove> moves;
  std::vector<AtomTrace> traces;
  int iterations_attempted = 0;
  int iterations_used = 0; // iterations that emitted at least one move
  StopReason stop_reason = StopReason::MaxIterations;
  BitGrid final_grid;
  bool success = false;
  std::vector<SiteCoord> residual_holes;
  std::vector<std::size_t> fill_history; // target popcount, index 0 = before any move
};

namespace detail {

inline int resolve_max_iterations(const SchedulerConfig& cfg, int quadrant_side) {
  if (cfg.max_iterations < 0) {
    throw std::invalid_argument("max iterations must be >= 1");
  }
  return cfg.max_iterations == 0 ? quadrant_side : cfg.max_iterations;
}

inline BitVec resolve_enable(const SchedulerConfig& cfg, int quadrant_side) {
  switch (cfg.sen_policy) {
  case SEnPolicy::FullPack: return full_enable(quadrant_side);
  case SEnPolicy::ColumnLimit:
    if (cfg.sen_limit < 0) {
      throw std::invalid_argument("column limit must be >= 0");
    }
    return column_limit_enable(quadrant_side, cfg.sen_limit);
  }
  throw std::invalid_argument("unknown s_en policy");
}

inline void finish_result(ScheduleResult& res, const BitGrid& initial, BitGrid final_grid,
                          TargetRegion target) {
  res.final_grid = std::move(final_grid);
  res.success = target_full(res.final_grid, target);
  res.residual_holes = target_holes(res.final_grid, target);
  res.traces = trace_atoms(res.moves, initial);
}

} // namespace detail

/// Quadrant-based rearrangement: split and flip the four quadrants, run the
/// shift kernel row-wise then column-wise on each, and merge the recorded
/// commands back into global moves, scan index by scan index. Iterates until
/// the target is full, a full iteration emits no effective command, or the
/// iteration budget runs out.
inline ScheduleResult qrm_schedule(const BitGrid& grid, TargetRegion target,
                                   const SchedulerConfig& cfg = {}) {
  validate_target(grid.side(), target);
  const int qw = grid.side() / 2;
  const int max_iterations = detail::resolve_max_iterations(cfg, qw);
  const BitVec enable = detail::resolve_enable(cfg, qw);

  ScheduleResult res;
  res.fill_history.push_back(target_popcount(grid, target));
  auto quads = split_quadrants(grid);
  int ordinal = 0;

  if (target_full(grid, target)) {
    res.stop_reason = StopReason::TargetFilled;
    detail::finish_result(res, grid, merge_quadrants(quads), target);
    return res;
  }
  for (int iter = 1; iter <= max_iterations; ++iter) {
    res.iterations_attempted = iter;
    bool emitted = false;
    for (const Axis axis : {Axis::Rows, Axis::Columns}) {
      std::vector<std::vector<QuadrantCommand>> by_scan(static_cast<std::size_t>(qw));
      for (auto& quad : quads) {
        auto pass = compress_pass(quad, axis, enable);
        quad = std::move(pass.quadrant);
        for (int line = 0; line < qw; ++line) {
          for (const auto& exec : pass.executions[static_cast<std::size_t>(line)]) {
            by_scan[static_cast<std::size_t>(exec.scan_index)].push_back(
                {quad.quadrant, iter, axis, line, exec.scan_index, exec.hole_pos,
                 exec.moved_atoms});
          }
        }
      }
      for (int s = 0; s < qw; ++s) {
        for (auto& move : merge_commands(by_scan[static_cast<std::size_t>(s)], grid.side())) {
          move.ordinal = ordinal++;
          res.moves.push_back(std::move(move));
          emitted = true;
        }
      }
    }
    const BitGrid merged = merge_quadrants(quads);
    res.fill_history.push_back(target_popcount(merged, target));
    if (emitted) {
      ++res.iterations_used;
    }
    if (target_full(merged, target)) {
      res.stop_reason = StopReason::TargetFilled;
      break;
    }
    if (!emitted && cfg.fixpoint_early_stop) {
      res.stop_reason = StopReason::Fixpoint;
      break;
    }
    res.stop_reason = StopReason::MaxIterations;
  }
  detail::finish_result(res, grid, merge_quadrants(quads), target);
  return res;
}

namespace detail {

/// One round of filling a single target line (a column for horizontal moves,
/// a row for vertical ones) from its outer side. Emits one-step merged moves
/// until every hole in the line is filled or out of supply.
inline bool fill_target_line(BitGrid& grid, TargetRegion /*target*/, Axis axis, int line,
                             Direction dir, int distance, int iteration, int& ordinal,
                             std::vector<MergedMove>& moves) {
  const int side = grid.side();
  const bool toward_lo = dir == Direction::West || dir == Direction::North;
  const int outer_lo = toward_lo ? line + 1 : 0;
  const int outer_hi = toward_lo ? side - 1 : line - 1;
  if (outer_lo > outer_hi) {
    return false;
  }
  bool any = false;
  for (;;) {
    MergedMove move{0, iteration, axis, distance, dir, 1, {}};
    for (int other = 0; other < side; ++other) {
      const bool hole = axis == Axis::Rows ? !grid.get(other, line) : !grid.get(line, other);
      if (!hole) {
        continue;
      }
      bool supply = false;
      for (int x = outer_lo; x <= outer_hi && !supply; ++x) {
        supply = axis == Axis::Rows ? grid.get(other, x) : grid.get(x, other);
      }
      if (supply) {
        move.lines.push_back({other, outer_lo, outer_hi});
      }
    }
    if (move.lines.empty()) {
      return any;
    }
    move.ordinal = ordinal++;
    apply_merged_move(grid, move);
    moves.push_back(std::move(move));
    any = true;
  }
}

} // namespace detail

/// Typical center-out rearrangement on the whole array: fill each target
/// column from its outer side, innermost column first, with repeated
/// single-step row shifts; then fill each target row with column shifts.
/// Repeats the two phases until nothing changes or the budget runs out.
inline ScheduleResult baseline_schedule(const BitGrid& grid, TargetRegion target,
                                        const SchedulerConfig& cfg = {}) {
  validate_target(grid.side(), target);
  const int half = grid.side() / 2;
  const int max_iterations = detail::resolve_max_iterations(cfg, half);

  ScheduleResult res;
  res.fill_history.push_back(target_popcount(grid, target));
  BitGrid work = grid;
  int ordinal = 0;

  if (target_full(work, target)) {
    res.stop_reason = StopReason::TargetFilled;
    detail::finish_result(res, grid, std::move(work), target);
    return res;
  }
  for (int iter = 1; iter <= max_iterations; ++iter) {
    res.iterations_attempted = iter;
    bool emitted = false;
    for (int k = 0; k < target.side / 2; ++k) {
      emitted |= detail::fill_target_line(work, target, Axis::Rows, half - 1 - k,
                                          Direction::East, k, iter, ordinal, res.moves);
      emitted |= detail::fill_target_line(work, target, Axis::Rows, half + k, Direction::West,
                                          k, iter, ordinal, res.moves);
    }
    for (int k = 0; k < target.side / 2; ++k) {
      emitted |= detail::fill_target_line(work, target, Axis::Columns, half - 1 - k,
                                          Direction::South, k, iter, ordinal, res.moves);
      emitted |= detail::fill_target_line(work, target, Axis::Columns, half + k,
                                          Direction::North, k, iter, ordinal, res.moves);
    }
    res.fill_history.push_back(target_popcount(work, target));
    if (emitted) {
      ++res.iterations_used;
    }
    if (target_full(work, target)) {
      res.stop_reason = StopReason::TargetFilled;
      break;
    }
    if (!emitted && cfg.fixpoint_early_stop) {
      res.stop_reason = StopReason::Fixpoint;
      break;
    }
    res.stop_reason = StopReason::MaxIterations;
  }
  detail::finish_result(res, grid, std::move(work), target);
  return res;
}

inline ScheduleResult run_scheduler(const BitGrid& grid, TargetRegion target, bool baseline,
                                    const SchedulerConfig& cfg = {}) {
  return baseline ? baseline_schedule(grid, target, cfg) : qrm_schedule(grid, target, cfg);
}

} // namespace qrm
