#pragma once

#include <algorithm>
#include <cstddef>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "qrm/bitgrid.hpp"
#include "qrm/grid.hpp"
#include "qrm/scheduler.hpp"
#include "qrm/types.hpp"

namespace qrm {

// Physical move model. Selecting RF tones per axis creates a trap at every
// (row, col) in the cross product of the chosen row and column sets; all
// trapped atoms are then dragged in lockstep by the same displacement.

struct TweezerMove {
  std::vector<int> rows; // sorted, distinct
  std::vector<int> cols; // sorted, distinct
  Direction direction = Direction::East;
  int steps = 1;
  // provenance of the merged move this was lowered from
  int ordinal = 0;
  int iteration = 0;
  Axis axis = Axis::Rows;

  friend bool operator==(const TweezerMove&, const TweezerMove&) = default;
};

struct MoveViolation {
  enum class Kind { Collision, OutOfBounds, UnintendedCapture };
  Kind kind = Kind::Collision;
  std::vector<SiteCoord> sites;
};

inline const char* violation_name(MoveViolation::Kind k) {
  switch (k) {
  case MoveViolation::Kind::Collision: return "collision";
  case MoveViolation::Kind::OutOfBounds: return "out-of-bounds";
  default: return "unintended-capture";
  }
}

inline void validate_move_shape(const TweezerMove& move) {
  if (move.rows.empty() || move.cols.empty()) {
    throw std::invalid_argument("tweezer move needs non-empty row and column sets");
  }
  if (move.steps <= 0) {
    throw std::invalid_argument("tweezer move needs a positive step count");
  }
  const auto strictly_increasing = [](const std::vector<int>& xs) {
    for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
      if (xs[i] >= xs[i + 1]) {
        return false;
      }
    }
    return true;
  };
  if (!strictly_increasing(move.rows) || !strictly_increasing(move.cols)) {
    throw std::invalid_argument("tweezer move row/column sets must be sorted and distinct");
  }
}

/// All trap sites the move generates: the full cross product, row-major.
inline std::vector<SiteCoord> trap_set(const TweezerMove& move) {
  validate_move_shape(move);
  std::vector<SiteCoord> traps;
  traps.reserve(move.rows.size() * move.cols.size());
  for (const int r : move.rows) {
    for (const int c : move.cols) {
      traps.push_back({r, c});
    }
  }
  return traps;
}

/// Check that every trapped atom can be displaced by direction x steps onto a
/// site that is empty or vacated by another trapped atom. Returns the list of
/// violations; empty means the move is legal on this grid.
inline std::vector<MoveViolation> validate_move(const BitGrid& grid, const TweezerMove& move) {
  validate_move_shape(move);
  std::vector<MoveViolation> violations;
  const int dr = row_delta(move.direction) * move.steps;
  const int dc = col_delta(move.direction) * move.steps;
  const auto in_trap_set = [&](SiteCoord s) {
    return std::binary_search(move.rows.begin(), move.rows.end(), s.row) &&
           std::binary_search(move.cols.begin(), move.cols.end(), s.col);
  };
  for (const int r : move.rows) {
    for (const int c : move.cols) {
      const SiteCoord site{r, c};
      if (!grid.in_bounds(site)) {
        violations.push_back({MoveViolation::Kind::OutOfBounds, {site}});
        continue;
      }
      if (!grid.get(site)) {
        continue;
      }
      const SiteCoord dest{r + dr, c + dc};
      if (!grid.in_bounds(dest)) {
        violations.push_back({MoveViolation::Kind::OutOfBounds, {site}});
      } else if (grid.get(dest) && !in_trap_set(dest)) {
        // a trapped destination atom moves along in lockstep; anything else
        // is a collision
        violations.push_back({MoveViolation::Kind::Collision, {dest}});
      }
    }
  }
  return violations;
}

/// Occupied traps that the given intent mask does not cover.
inline std::vector<MoveViolation> validate_capture(const BitGrid& grid, const TweezerMove& move,
                                                   const BitGrid& intended) {
  std::vector<MoveViolation> violations;
  for (const int r : move.rows) {
    for (const int c : move.cols) {
      const SiteCoord site{r, c};
      if (grid.in_bounds(site) && grid.get(site) && !intended.get(site)) {
        violations.push_back({MoveViolation::Kind::UnintendedCapture, {site}});
      }
    }
  }
  return violations;
}

namespace detail {

/// In-place lockstep displacement with no validity check; callers must have
/// validated the move against this exact grid state.
inline void apply_move_unchecked(BitGrid& grid, const TweezerMove& move) {
  const int dr = row_delta(move.direction) * move.steps;
  const int dc = col_delta(move.direction) * move.steps;
  std::vector<SiteCoord> atoms;
  for (const int r : move.rows) {
    for (const int c : move.cols) {
      if (grid.get(r, c)) {
        atoms.push_back({r, c});
        grid.set(r, c, false);
      }
    }
  }
  for (const auto& site : atoms) {
    grid.set({site.row + dr, site.col + dc}, true);
  }
}

} // namespace detail

/// Displace every trapped atom at once: remove the trapped set, re-insert it
/// shifted. The move must be valid.
inline BitGrid apply_move(const BitGrid& grid, const TweezerMove& move) {
  if (const auto violations = validate_move(grid, move); !violations.empty()) {
    throw std::logic_error(std::string("apply_move on an invalid move (") +
                           violation_name(violations.front().kind) + ")");
  }
  BitGrid next = grid;
  detail::apply_move_unchecked(next, move);
  return next;
}

namespace detail {

inline TweezerMove group_to_tweezer(const MergedMove& merged, std::pair<int, int> range,
                                    std::vector<int> lines) {
  TweezerMove move;
  move.direction = merged.direction;
  move.steps = merged.steps;
  move.iteration = merged.iteration;
  move.axis = merged.axis;
  std::vector<int> span(static_cast<std::size_t>(range.second - range.first + 1));
  for (int x = range.first; x <= range.second; ++x) {
    span[static_cast<std::size_t>(x - range.first)] = x;
  }
  if (merged.axis == Axis::Rows) {
    move.rows = std::move(lines);
    move.cols = std::move(span);
  } else {
    move.rows = std::move(span);
    move.cols = std::move(lines);
  }
  return move;
}

inline std::string describe_violations(const std::vector<MoveViolation>& violations) {
  std::ostringstream os;
  for (const auto& v : violations) {
    os << ' ' << violation_name(v.kind);
    for (const auto& s : v.sites) {
      os << " (" << s.row << ',' << s.col << ')';
    }
  }
  return os.str();
}

} // namespace detail

/// Lower merged moves onto the cross-product constraint. Lines sharing one
/// segment range collapse into a single tweezer move; mixed ranges would trap
/// parked atoms, so they are emitted range by range. If a grouped move still
/// fails validation it is retried one line at a time before giving up.
inline std::vector<TweezerMove> lower(const std::vector<MergedMove>& merged,
                                      const BitGrid& grid) {
  BitGrid work = grid;
  std::vector<TweezerMove> out;
  int ordinal = 0;
  for (const auto& move : merged) {
    BitGrid intended(grid.side());
    for (const auto& seg : move.lines) {
      for (int x = seg.lo; x <= seg.hi; ++x) {
        const SiteCoord site = move.axis == Axis::Rows ? SiteCoord{seg.line, x}
                                                       : SiteCoord{x, seg.line};
        if (work.in_bounds(site) && work.get(site)) {
          intended.set(site, true);
        }
      }
    }
    std::map<std::pair<int, int>, std::vector<int>> groups;
    for (const auto& seg : move.lines) {
      groups[{seg.lo, seg.hi}].push_back(seg.line);
    }
    std::vector<TweezerMove> pending;
    for (auto& [range, lines] : groups) {
      std::sort(lines.begin(), lines.end());
      pending.push_back(detail::group_to_tweezer(move, range, std::move(lines)));
    }
    for (auto& candidate : pending) {
      auto violations = validate_move(work, candidate);
      auto captures = validate_capture(work, candidate, intended);
      violations.insert(violations.end(), captures.begin(), captures.end());
      std::vector<TweezerMove> accepted;
      if (violations.empty()) {
        accepted.push_back(std::move(candidate));
      } else {
        // one line per move as last resort
        const auto& lines = move.axis == Axis::Rows ? candidate.rows : candidate.cols;
        for (const int line : lines) {
          TweezerMove single = candidate;
          if (move.axis == Axis::Rows) {
            single.rows = {line};
          } else {
            single.cols = {line};
          }
          auto single_bad = validate_move(work, single);
          auto single_captures = validate_capture(work, single, intended);
          single_bad.insert(single_bad.end(), single_captures.begin(), single_captures.end());
          if (!single_bad.empty()) {
            throw LoweringError("merged move " + std::to_string(move.ordinal) +
                                " cannot be lowered:" + detail::describe_violations(single_bad));
          }
          accepted.push_back(std::move(single));
        }
      }
      for (auto& mv : accepted) {
        mv.ordinal = ordinal++;
        detail::apply_move_unchecked(work, mv); // already validated above
        out.push_back(std::move(mv));
      }
    }
  }
  return out;
}

struct SimulationResult {
  BitGrid final_grid;
  std::size_t moves_executed = 0;
  std::vector<MoveViolation> violations; // non-empty: aborted before this move ran
  std::vector<std::size_t> target_fill_history;

  bool ok() const { return violations.empty(); }
};

/// Execute tweezer moves sequentially, validating each against the evolving
/// grid. Any violation aborts the run and is reported.
inline SimulationResult simulate(const BitGrid& grid, const std::vector<TweezerMove>& moves,
                                 const TargetRegion* target = nullptr) {
  SimulationResult res{grid, 0, {}, {}};
  if (target != nullptr) {
    res.target_fill_history.push_back(target_popcount(res.final_grid, *target));
  }
  for (const auto& move : moves) {
    auto violations = validate_move(res.final_grid, move);
    if (!violations.empty()) {
      res.violations = std::move(violations);
      return res;
    }
    detail::apply_move_unchecked(res.final_grid, move);
    ++res.moves_executed;
    if (target != nullptr) {
      res.target_fill_history.push_back(target_popcount(res.final_grid, *target));
    }
  }
  return res;
}

} // namespace qrm
