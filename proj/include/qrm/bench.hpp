#pragma once

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "qrm/aod.hpp"
#include "qrm/grid.hpp"
#include "qrm/scheduler.hpp"

namespace qrm {

// Seeded benchmark harness: one scheduling run per seed, machine-readable
// rows plus an aggregate. Everything except the wall-time column is
// deterministic for a fixed seed range.

struct BenchRow {
  std::uint64_t seed = 0;
  std::size_t popcount = 0;
  bool success = false;
  int iterations = 0;
  std::size_t merged_moves = 0;
  std::size_t lowered_moves = 0;
  double wall_us = 0.0;
};

struct BenchReport {
  int width = 0;
  TargetRegion target;
  double fill_probability = 0.5;
  bool baseline = false;
  std::vector<BenchRow> rows;

  double success_rate = 0.0;
  double median_iterations = 0.0;
  double median_merged_moves = 0.0;
  double median_lowered_moves = 0.0;
  double median_wall_us = 0.0;
  std::map<int, std::size_t> iteration_histogram; // iterations used -> runs
};

namespace detail {

inline double median(std::vector<double> values) {
  if (values.empty()) {
    return 0.0;
  }
  std::sort(values.begin(), values.end());
  const std::size_t mid = values.size() / 2;
  if (values.size() % 2 == 1) {
    return values[mid];
  }
  return (values[mid - 1] + values[mid]) / 2.0;
}

} // namespace detail

inline BenchReport run_bench(int width, TargetRegion target, double fill_probability,
                             std::uint64_t seed_begin, std::uint64_t seed_count, bool baseline,
                             const SchedulerConfig& cfg = {}) {
  validate_target(width, target);
  BenchReport report;
  report.width = width;
  report.target = target;
  report.fill_probability = fill_probability;
  report.baseline = baseline;
  report.rows.reserve(seed_count);

  std::vector<double> iterations;
  std::vector<double> merged;
  std::vector<double> lowered_counts;
  std::vector<double> walls;
  std::size_t successes = 0;

  for (std::uint64_t s = 0; s < seed_count; ++s) {
    const std::uint64_t seed = seed_begin + s;
    const BitGrid grid = random_load(width, {fill_probability, seed});
    const auto t0 = std::chrono::steady_clock::now();
    const ScheduleResult result = run_scheduler(grid, target, baseline, cfg);
    const auto physical = lower(result.moves, grid);
    const auto t1 = std::chrono::steady_clock::now();

    BenchRow row;
    row.seed = seed;
    row.popcount = grid.popcount();
    row.success = result.success;
    row.iterations = result.iterations_used;
    row.merged_moves = result.moves.size();
    row.lowered_moves = physical.size();
    row.wall_us = std::chrono::duration<double, std::micro>(t1 - t0).count();
    report.rows.push_back(row);

    successes += row.success ? 1 : 0;
    iterations.push_back(static_cast<double>(row.iterations));
    merged.push_back(static_cast<double>(row.merged_moves));
    lowered_counts.push_back(static_cast<double>(row.lowered_moves));
    walls.push_back(row.wall_us);
    ++report.iteration_histogram[row.iterations];
  }
  if (!report.rows.empty()) {
    report.success_rate = static_cast<double>(successes) / static_cast<double>(report.rows.size());
  }
  report.median_iterations = detail::median(std::move(iterations));
  report.median_merged_moves = detail::median(std::move(merged));
  report.median_lowered_moves = detail::median(std::move(lowered_counts));
  report.median_wall_us = detail::median(std::move(walls));
  return report;
}

inline std::string bench_table(const BenchReport& report) {
  std::ostringstream os;
  os << "seed\tpopcount\tsuccess\titerations\tmerged_moves\tlowered_moves\twall_us\n";
  for (const auto& row : report.rows) {
    os << row.seed << '\t' << row.popcount << '\t' << (row.success ? 1 : 0) << '\t'
       << row.iterations << '\t' << row.merged_moves << '\t' << row.lowered_moves << '\t'
       << row.wall_us << '\n';
  }
  return os.str();
}

inline std::string bench_summary(const BenchReport& report) {
  std::ostringstream os;
  os << "# algo=" << (report.baseline ? "baseline" : "qrm") << " W=" << report.width
     << " T=" << report.target.side << " p=" << report.fill_probability
     << " runs=" << report.rows.size() << '\n';
  os << "# success_rate=" << report.success_rate
     << " median_iterations=" << report.median_iterations
     << " median_merged_moves=" << report.median_merged_moves
     << " median_lowered_moves=" << report.median_lowered_moves
     << " median_wall_us=" << report.median_wall_us << '\n';
  os << "# iterations_histogram:";
  for (const auto& [iters, count] : report.iteration_histogram) {
    os << ' ' << iters << ':' << count;
  }
  os << '\n';
  return os.str();
}

} // namespace qrm
