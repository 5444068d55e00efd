#include <gtest/gtest.h>

#include <set>

#include "qrm/grid.hpp"
#include "qrm/scheduler.hpp"
#include "qrm/shift_kernel.hpp"

namespace qrm {
namespace {

// Independent route for the final occupancy: run the compress passes on each
// quadrant separately and map the bitmaps back, without going through command
// recording, merging or move execution.
BitGrid independent_quadrant_final(const BitGrid& grid, int iterations, const BitVec& enable) {
  auto quads = split_quadrants(grid);
  for (int iter = 0; iter < iterations; ++iter) {
    for (auto& quad : quads) {
      quad = compress_pass(quad, Axis::Rows, enable).quadrant;
      quad = compress_pass(quad, Axis::Columns, enable).quadrant;
    }
  }
  return merge_quadrants(quads);
}

BitGrid replay_merged(const BitGrid& grid, const std::vector<MergedMove>& moves) {
  BitGrid g = grid;
  for (const auto& move : moves) {
    apply_merged_move(g, move);
  }
  return g;
}

TEST(QrmSchedule, DefectFreeGridNeedsNothing) {
  const BitGrid grid = random_load(8, {1.0, 0});
  const auto res = qrm_schedule(grid, TargetRegion{4});
  EXPECT_TRUE(res.moves.empty());
  EXPECT_TRUE(res.success);
  EXPECT_EQ(res.iterations_used, 0);
  EXPECT_EQ(res.stop_reason, StopReason::TargetFilled);
  EXPECT_EQ(res.final_grid, grid);
  for (const auto& trace : res.traces) {
    EXPECT_TRUE(trace.hops.empty());
  }
}

TEST(QrmSchedule, EmptyGridStopsAtFixpoint) {
  const BitGrid grid(8);
  const auto res = qrm_schedule(grid, TargetRegion{4});
  EXPECT_TRUE(res.moves.empty());
  EXPECT_FALSE(res.success);
  EXPECT_EQ(res.stop_reason, StopReason::Fixpoint);
  EXPECT_EQ(res.iterations_used, 0);
  EXPECT_EQ(res.residual_holes.size(), 16U);
}

TEST(QrmSchedule, AgreesWithIndependentQuadrantCompression) {
  for (const int w : {8, 12, 20}) {
    for (std::uint64_t seed = 0; seed < 40; ++seed) {
      const BitGrid grid = random_load(w, {0.5, seed});
      const TargetRegion target{w / 2};
      const auto res = qrm_schedule(grid, target);
      const BitGrid oracle =
          independent_quadrant_final(grid, res.iterations_attempted, full_enable(w / 2));
      EXPECT_EQ(res.final_grid, oracle) << "w=" << w << " seed=" << seed;
      EXPECT_EQ(replay_merged(grid, res.moves), oracle) << "w=" << w << " seed=" << seed;
    }
  }
}

TEST(QrmSchedule, ConservesAtomsAndFillsMonotonically) {
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const BitGrid grid = random_load(12, {0.4, seed});
    const auto res = qrm_schedule(grid, TargetRegion{6});
    EXPECT_EQ(res.final_grid.popcount(), grid.popcount());
    for (std::size_t i = 1; i < res.fill_history.size(); ++i) {
      EXPECT_GE(res.fill_history[i], res.fill_history[i - 1]);
    }
    EXPECT_EQ(res.success, res.residual_holes.empty());
  }
}

TEST(QrmSchedule, ReachesFixpointOrTargetWithinBudget) {
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const BitGrid grid = random_load(20, {0.5, seed});
    const auto res = qrm_schedule(grid, TargetRegion{10});
    EXPECT_NE(res.stop_reason, StopReason::MaxIterations);
    EXPECT_LE(res.iterations_attempted, 10);
  }
}

TEST(QrmSchedule, FixedBudgetModeRunsAllIterations) {
  // Without the early stop the loop spends its whole budget even though an
  // empty grid settles immediately; later iterations emit nothing.
  SchedulerConfig cfg;
  cfg.max_iterations = 4;
  cfg.fixpoint_early_stop = false;
  const auto res = qrm_schedule(BitGrid(8), TargetRegion{4}, cfg);
  EXPECT_EQ(res.iterations_attempted, 4);
  EXPECT_EQ(res.iterations_used, 0);
  EXPECT_TRUE(res.moves.empty());
  EXPECT_EQ(res.stop_reason, StopReason::MaxIterations);
}

TEST(QrmSchedule, FixpointIsStable) {
  // A run that stopped on a fixpoint emits nothing when restarted from its
  // own final grid.
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const BitGrid grid = random_load(12, {0.3, seed});
    const auto res = qrm_schedule(grid, TargetRegion{6});
    if (res.stop_reason != StopReason::Fixpoint) {
      continue;
    }
    const auto again = qrm_schedule(res.final_grid, TargetRegion{6});
    EXPECT_TRUE(again.moves.empty());
    EXPECT_EQ(again.final_grid, res.final_grid);
  }
}

TEST(QrmSchedule, DirectionLawTowardCenter) {
  const BitGrid grid = random_load(12, {0.5, 3});
  const auto res = qrm_schedule(grid, TargetRegion{6});
  ASSERT_FALSE(res.moves.empty());
  const int half = grid.side() / 2;
  for (const auto& move : res.moves) {
    const bool horizontal = move.axis == Axis::Rows;
    EXPECT_EQ(horizontal,
              move.direction == Direction::East || move.direction == Direction::West);
    for (const auto& seg : move.lines) {
      EXPECT_LE(seg.lo, seg.hi);
      if (move.direction == Direction::East || move.direction == Direction::South) {
        EXPECT_LT(seg.hi, half); // west/north side pushes toward the center line
      } else {
        EXPECT_GE(seg.lo, half);
      }
    }
  }
}

TEST(QrmSchedule, ColumnLimitMaskRestrictsScanIndices) {
  const BitGrid grid = random_load(12, {0.5, 5});
  SchedulerConfig cfg;
  cfg.sen_policy = SEnPolicy::ColumnLimit;
  cfg.sen_limit = 2;
  const auto res = qrm_schedule(grid, TargetRegion{6}, cfg);
  for (const auto& move : res.moves) {
    EXPECT_LT(move.scan_index, 2);
  }
}

TEST(QrmSchedule, InfeasibleQuadrantReportsResidualHoles) {
  // All atoms in the NW quarter; the other quadrants cannot fill.
  BitGrid grid(8);
  for (int r = 0; r < 4; ++r) {
    for (int c = 0; c < 4; ++c) {
      grid.set(r, c, true);
    }
  }
  const auto res = qrm_schedule(grid, TargetRegion{4});
  EXPECT_FALSE(res.success);
  EXPECT_FALSE(res.residual_holes.empty());
  EXPECT_EQ(res.final_grid.popcount(), 16U);
  EXPECT_EQ(target_popcount(res.final_grid, TargetRegion{4}), 4U); // NW corner filled
}

TEST(QrmSchedule, ConfigurationErrors) {
  const BitGrid grid = random_load(8, {0.5, 0});
  EXPECT_THROW(qrm_schedule(grid, TargetRegion{3}), std::invalid_argument);
  SchedulerConfig bad;
  bad.max_iterations = -1;
  EXPECT_THROW(qrm_schedule(grid, TargetRegion{4}, bad), std::invalid_argument);
  SchedulerConfig bad_limit;
  bad_limit.sen_policy = SEnPolicy::ColumnLimit;
  bad_limit.sen_limit = -2;
  EXPECT_THROW(qrm_schedule(grid, TargetRegion{4}, bad_limit), std::invalid_argument);
}

TEST(MergeCommands, WestSideRowsMergeIntoOneEastMove) {
  // NW local row 2 and SW local row 1, both command scan index 0, W = 10.
  const std::vector<QuadrantCommand> cmds = {
      {QuadrantId::NW, 1, Axis::Rows, 2, 0, 0, true},
      {QuadrantId::SW, 1, Axis::Rows, 1, 0, 0, true},
  };
  const auto merged = merge_commands(cmds, 10);
  ASSERT_EQ(merged.size(), 1U);
  EXPECT_EQ(merged[0].direction, Direction::East);
  EXPECT_EQ(merged[0].axis, Axis::Rows);
  EXPECT_EQ(merged[0].scan_index, 0);
  ASSERT_EQ(merged[0].lines.size(), 2U);
  EXPECT_EQ(merged[0].lines[0], (LineSegment{2, 0, 3})); // NW row 2 -> global row 2
  EXPECT_EQ(merged[0].lines[1], (LineSegment{6, 0, 3})); // SW row 1 -> global row 6
}

TEST(MergeCommands, EmptyShiftsArePruned) {
  const std::vector<QuadrantCommand> cmds = {
      {QuadrantId::NW, 1, Axis::Rows, 0, 0, 0, false},
      {QuadrantId::NE, 1, Axis::Rows, 1, 0, 0, false},
  };
  EXPECT_TRUE(merge_commands(cmds, 10).empty());
}

TEST(MergeCommands, SingleQuadrantKeepsItsSideDirection) {
  const std::vector<QuadrantCommand> cmds = {
      {QuadrantId::NE, 2, Axis::Columns, 0, 1, 1, true},
  };
  const auto merged = merge_commands(cmds, 10);
  ASSERT_EQ(merged.size(), 1U);
  EXPECT_EQ(merged[0].direction, Direction::South); // NE columns shift from the north
  EXPECT_EQ(merged[0].lines[0], (LineSegment{5, 0, 2}));
}

TEST(MergeCommands, MixedTriplesAreRejected) {
  const std::vector<QuadrantCommand> cmds = {
      {QuadrantId::NW, 1, Axis::Rows, 0, 0, 0, true},
      {QuadrantId::SW, 1, Axis::Rows, 0, 1, 0, true},
  };
  EXPECT_THROW(merge_commands(cmds, 10), std::invalid_argument);
  const std::vector<QuadrantCommand> axes = {
      {QuadrantId::NW, 1, Axis::Rows, 0, 0, 0, true},
      {QuadrantId::SW, 1, Axis::Columns, 0, 0, 0, true},
  };
  EXPECT_THROW(merge_commands(axes, 10), std::invalid_argument);
}

TEST(TraceAtoms, SingleMoveSingleHop) {
  BitGrid grid(4);
  grid.set(1, 0, true);
  const std::vector<MergedMove> moves = {
      {0, 1, Axis::Rows, 0, Direction::East, 1, {{1, 0, 0}}}};
  const auto traces = trace_atoms(moves, grid);
  ASSERT_EQ(traces.size(), 1U);
  EXPECT_EQ(traces[0].origin, (SiteCoord{1, 0}));
  EXPECT_EQ(traces[0].final_site, (SiteCoord{1, 1}));
  ASSERT_EQ(traces[0].hops.size(), 1U);
  EXPECT_EQ(traces[0].hops[0], (std::pair{Direction::East, 1}));
}

TEST(TraceAtoms, ConsecutiveSameDirectionHopsCoalesce) {
  BitGrid grid(4);
  grid.set(0, 0, true);
  const std::vector<MergedMove> moves = {
      {0, 1, Axis::Rows, 0, Direction::East, 1, {{0, 0, 0}}},
      {1, 1, Axis::Rows, 1, Direction::East, 1, {{0, 1, 1}}},
  };
  const auto traces = trace_atoms(moves, grid);
  ASSERT_EQ(traces.size(), 1U);
  ASSERT_EQ(traces[0].hops.size(), 1U);
  EXPECT_EQ(traces[0].hops[0], (std::pair{Direction::East, 2}));
  EXPECT_EQ(traces[0].final_site, (SiteCoord{0, 2}));
}

TEST(TraceAtoms, ReplayReproducesTheFinalGrid) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const BitGrid grid = random_load(12, {0.5, seed});
    const auto res = qrm_schedule(grid, TargetRegion{6});
    EXPECT_EQ(res.traces.size(), grid.popcount());
    BitGrid rebuilt(grid.side());
    for (const auto& trace : res.traces) {
      SiteCoord pos = trace.origin;
      for (const auto& [dir, steps] : trace.hops) {
        pos.row += row_delta(dir) * steps;
        pos.col += col_delta(dir) * steps;
      }
      EXPECT_EQ(pos, trace.final_site);
      EXPECT_FALSE(rebuilt.get(trace.final_site));
      rebuilt.set(trace.final_site, true);
    }
    EXPECT_EQ(rebuilt, res.final_grid);
  }
}

TEST(TraceAtoms, MismatchedGridIsRejected) {
  BitGrid grid(4);
  grid.set(0, 0, true);
  grid.set(0, 1, true);
  // Move claims the site next to the atom is free; it is not.
  const std::vector<MergedMove> moves = {
      {0, 1, Axis::Rows, 0, Direction::East, 1, {{0, 0, 0}}}};
  EXPECT_THROW(trace_atoms(moves, grid), std::invalid_argument);
}

TEST(BaselineSchedule, DefectFreeGridNeedsNothing) {
  const BitGrid grid = random_load(8, {1.0, 1});
  const auto res = baseline_schedule(grid, TargetRegion{4});
  EXPECT_TRUE(res.moves.empty());
  EXPECT_TRUE(res.success);
}

TEST(BaselineSchedule, SingleAdjacentHoleTakesExactlyOneMove) {
  // Target 2x2 at the center of an 8x8 grid; the only defect is the
  // west-center site, with one atom directly west of it.
  BitGrid grid(8);
  const TargetRegion target{2};
  for (int r = 3; r <= 4; ++r) {
    for (int c = 3; c <= 4; ++c) {
      grid.set(r, c, true);
    }
  }
  grid.set(3, 3, false);
  grid.set(3, 2, true);
  const auto res = baseline_schedule(grid, target);
  EXPECT_TRUE(res.success);
  ASSERT_EQ(res.moves.size(), 1U);
  EXPECT_EQ(res.moves[0].direction, Direction::East);
  EXPECT_EQ(res.moves[0].axis, Axis::Rows);
  ASSERT_EQ(res.moves[0].lines.size(), 1U);
  EXPECT_EQ(res.moves[0].lines[0], (LineSegment{3, 0, 2}));
  ASSERT_EQ(res.traces.size(), 4U);
}

TEST(BaselineSchedule, ConservesFillsMonotonicallyAndTerminates) {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const BitGrid grid = random_load(12, {0.5, seed});
    const auto res = baseline_schedule(grid, TargetRegion{6});
    EXPECT_EQ(res.final_grid.popcount(), grid.popcount());
    EXPECT_NE(res.stop_reason, StopReason::MaxIterations);
    for (std::size_t i = 1; i < res.fill_history.size(); ++i) {
      EXPECT_GE(res.fill_history[i], res.fill_history[i - 1]);
    }
    if (res.success) {
      EXPECT_TRUE(target_full(res.final_grid, TargetRegion{6}));
    }
    for (const auto& move : res.moves) {
      const bool horizontal =
          move.direction == Direction::East || move.direction == Direction::West;
      EXPECT_EQ(horizontal, move.axis == Axis::Rows);
      for (const auto& seg : move.lines) {
        if (move.direction == Direction::East || move.direction == Direction::South) {
          EXPECT_LT(seg.hi, grid.side() / 2);
        } else {
          EXPECT_GE(seg.lo, grid.side() / 2);
        }
      }
    }
  }
}

TEST(BaselineSchedule, SucceedsWheneverQrmDoesOnSmallGrids) {
  // Not an equivalence, but on these sizes the baseline sees at least the
  // same supply QRM sees; count agreement to catch gross regressions.
  int agree = 0;
  int total = 0;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const BitGrid grid = random_load(8, {0.5, seed});
    const auto q = qrm_schedule(grid, TargetRegion{4});
    const auto b = baseline_schedule(grid, TargetRegion{4});
    if (q.success && b.success) {
      EXPECT_EQ(target_popcount(q.final_grid, TargetRegion{4}),
                target_popcount(b.final_grid, TargetRegion{4}));
    }
    agree += q.success == b.success ? 1 : 0;
    ++total;
  }
  EXPECT_GT(agree * 100, 70 * total);
}

} // namespace
} // namespace qrm
