// Command-line front end: generate stochastic loads, compute and lower
// rearrangement schedules, verify them against the physical move model,
// benchmark seed sweeps, and render grids and schedules.
//
// Exit codes: 0 success, 1 verification/schedule failure, 2 bad input.

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qrm/qrm.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitVerificationFailure = 1;
constexpr int kExitBadInput = 2;

struct ScheduleOptions {
  std::string algo = "qrm";
  int max_iters = 0;
  int sen_limit = -1;
  bool no_early_stop = false;

  qrm::SchedulerConfig config() const {
    qrm::SchedulerConfig cfg;
    cfg.max_iterations = max_iters;
    cfg.fixpoint_early_stop = !no_early_stop;
    if (sen_limit >= 0) {
      cfg.sen_policy = qrm::SEnPolicy::ColumnLimit;
      cfg.sen_limit = sen_limit;
    }
    return cfg;
  }

  bool baseline() const {
    if (algo == "qrm") {
      return false;
    }
    if (algo == "baseline") {
      return true;
    }
    throw std::invalid_argument("unknown algorithm '" + algo + "'");
  }
};

void add_schedule_options(CLI::App* cmd, ScheduleOptions& opts) {
  cmd->add_option("--algo,-a", opts.algo, "qrm or baseline")->default_val("qrm");
  cmd->add_option("--max-iters", opts.max_iters, "iteration budget (default: W/2)");
  cmd->add_option("--sen-limit", opts.sen_limit,
                  "block shift commands at scan indices >= this value");
  cmd->add_flag("--no-early-stop", opts.no_early_stop,
                "keep iterating to the budget even after a fixpoint");
}

void warn_if_infeasible(const qrm::BitGrid& grid, qrm::TargetRegion target) {
  const auto report = qrm::feasibility(grid, target);
  for (const auto& q : report.quadrants) {
    if (!q.feasible) {
      std::cerr << "warning: quadrant " << qrm::quadrant_name(q.quadrant) << " holds "
                << q.available << " atoms but needs " << q.required << "\n";
    }
  }
}

int cmd_generate(int width, int target_side, double fill, std::uint64_t seed,
                 const std::string& out) {
  const qrm::TargetRegion target{target_side};
  qrm::validate_target(width, target);
  const qrm::BitGrid grid = qrm::random_load(width, {fill, seed});
  warn_if_infeasible(grid, target);
  qrm::write_packet_file(out, qrm::pack_bitfield(grid, target));
  std::cout << "grid W=" << width << " T=" << target_side << " atoms=" << grid.popcount()
            << " packets=" << qrm::packet_count_for(width) << " -> " << out << "\n";
  return kExitOk;
}

int cmd_schedule(const std::string& in, const ScheduleOptions& opts, const std::string& out) {
  const auto stream = qrm::read_packet_file(in);
  const qrm::BitGrid grid = qrm::unpack_bitfield(stream);
  const qrm::TargetRegion target{static_cast<int>(stream.target_side)};
  warn_if_infeasible(grid, target);

  const auto t0 = std::chrono::steady_clock::now();
  const qrm::ScheduleResult result = qrm::run_scheduler(grid, target, opts.baseline(), opts.config());
  const auto lowered = qrm::lower(result.moves, grid);
  const auto t1 = std::chrono::steady_clock::now();

  qrm::write_schedule_file(out, qrm::make_schedule_file(grid, target, result, lowered));
  std::cout << "algo=" << opts.algo << " iterations=" << result.iterations_used << "/"
            << result.iterations_attempted << " stop=" << qrm::stop_reason_name(result.stop_reason)
            << " merged_moves=" << result.moves.size() << " tweezer_moves=" << lowered.size()
            << " success=" << (result.success ? 1 : 0)
            << " residual=" << result.residual_holes.size() << " wall_us="
            << std::chrono::duration<double, std::micro>(t1 - t0).count() << "\n";
  return kExitOk;
}

int cmd_verify(const std::string& grid_path, const std::string& schedule_path) {
  const auto stream = qrm::read_packet_file(grid_path);
  const qrm::BitGrid grid = qrm::unpack_bitfield(stream);
  const auto schedule = qrm::read_schedule_file(schedule_path);

  if (schedule.width != grid.side() ||
      schedule.target.side != static_cast<int>(stream.target_side)) {
    std::cerr << "verify: schedule header does not match the grid file\n";
    return kExitVerificationFailure;
  }
  if (schedule.atom_count != grid.popcount()) {
    std::cerr << "verify: schedule was made for " << schedule.atom_count << " atoms, grid has "
              << grid.popcount() << "\n";
    return kExitVerificationFailure;
  }
  const qrm::TargetRegion target = schedule.target;
  const auto sim = qrm::simulate(grid, schedule.moves, &target);
  if (!sim.ok()) {
    std::cerr << "verify: move " << sim.moves_executed << " is invalid:";
    for (const auto& v : sim.violations) {
      std::cerr << ' ' << qrm::violation_name(v.kind);
      for (const auto& s : v.sites) {
        std::cerr << " (" << s.row << ',' << s.col << ')';
      }
    }
    std::cerr << "\n";
    return kExitVerificationFailure;
  }
  if (sim.final_grid.popcount() != grid.popcount()) {
    std::cerr << "verify: atom count changed from " << grid.popcount() << " to "
              << sim.final_grid.popcount() << "\n";
    return kExitVerificationFailure;
  }
  const bool success = qrm::target_full(sim.final_grid, target);
  if (success != schedule.success) {
    std::cerr << "verify: summary says success=" << schedule.success << " but replay gives "
              << success << "\n";
    return kExitVerificationFailure;
  }
  qrm::BitGrid from_traces(grid.side());
  for (const auto& t : schedule.traces) {
    from_traces.set(t.final_site, true);
  }
  if (!(from_traces == sim.final_grid)) {
    std::cerr << "verify: trace endpoints disagree with the replayed occupancy\n";
    return kExitVerificationFailure;
  }
  std::cout << "verify: ok (" << schedule.moves.size() << " moves, success=" << success
            << ", target " << qrm::target_popcount(sim.final_grid, target) << "/"
            << target.side * target.side << ")\n";
  return kExitOk;
}

int cmd_bench(int width, int target_side, double fill, std::uint64_t seed0, std::uint64_t seeds,
              const ScheduleOptions& opts, const std::string& out) {
  const qrm::TargetRegion target{target_side};
  qrm::validate_target(width, target);
  const auto report =
      qrm::run_bench(width, target, fill, seed0, seeds, opts.baseline(), opts.config());
  const std::string text = qrm::bench_table(report) + qrm::bench_summary(report);
  if (out.empty()) {
    std::cout << text;
  } else {
    std::ofstream os(out);
    if (!os) {
      throw qrm::ParseError("cannot open " + out + " for writing");
    }
    os << text;
    std::cout << qrm::bench_summary(report);
  }
  return kExitOk;
}

bool looks_like_packet_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  char magic[sizeof(qrm::kPacketMagic)] = {};
  is.read(magic, sizeof(magic));
  return is.gcount() == sizeof(magic) &&
         std::equal(magic, magic + sizeof(magic), qrm::kPacketMagic);
}

int show_packet(const std::string& path) {
  const auto stream = qrm::read_packet_file(path);
  const qrm::BitGrid grid = qrm::unpack_bitfield(stream);
  const qrm::TargetRegion target{static_cast<int>(stream.target_side)};
  std::cout << "grid W=" << grid.side() << " T=" << target.side << " atoms=" << grid.popcount()
            << " target_fill=" << qrm::target_popcount(grid, target) << "/"
            << target.side * target.side << "\n";
  std::cout << grid.render();
  return kExitOk;
}

int show_schedule(const std::string& path) {
  const auto schedule = qrm::read_schedule_file(path);
  qrm::BitGrid grid(schedule.width);
  for (const auto& t : schedule.traces) {
    grid.set(t.origin, true);
  }
  const qrm::TargetRegion target = schedule.target;
  const auto total = static_cast<std::size_t>(target.side) * static_cast<std::size_t>(target.side);
  std::cout << "schedule W=" << schedule.width << " T=" << target.side << " moves="
            << schedule.moves.size() << " iterations=" << schedule.iterations
            << " success=" << schedule.success << "\n";
  std::cout << "initial (target " << qrm::target_popcount(grid, target) << "/" << total << ")\n"
            << grid.render();

  std::size_t next = 0;
  int iteration = schedule.moves.empty() ? 0 : schedule.moves.front().iteration;
  while (next < schedule.moves.size()) {
    std::size_t executed = 0;
    while (next < schedule.moves.size() && schedule.moves[next].iteration == iteration) {
      const auto& move = schedule.moves[next];
      const auto violations = qrm::validate_move(grid, move);
      if (!violations.empty()) {
        std::cerr << "show: move " << move.ordinal << " does not replay on this grid\n";
        return kExitVerificationFailure;
      }
      grid = qrm::apply_move(grid, move);
      ++next;
      ++executed;
    }
    std::cout << "iteration " << iteration << ": " << executed << " moves, target "
              << qrm::target_popcount(grid, target) << "/" << total << "\n";
    if (next < schedule.moves.size()) {
      iteration = schedule.moves[next].iteration;
    }
  }
  std::cout << "final (target " << qrm::target_popcount(grid, target) << "/" << total << ")\n"
            << grid.render();
  return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Rearrangement scheduling for stochastically loaded atom arrays"};
  app.require_subcommand(1);

  int width = 8;
  int target_side = 4;
  double fill = 0.5;
  std::uint64_t seed = 0;
  std::uint64_t seed_count = 100;
  std::string in_path;
  std::string out_path;
  std::string grid_path;
  std::string schedule_path;
  std::string show_path;
  ScheduleOptions sched_opts;
  ScheduleOptions bench_opts;

  auto* generate = app.add_subcommand("generate", "stochastically load a grid, write packets");
  generate->add_option("--width,-w", width, "array side W (even)")->required();
  generate->add_option("--target,-t", target_side, "target side T (even)")->required();
  generate->add_option("--fill,-p", fill, "fill probability")->default_val(0.5);
  generate->add_option("--seed,-s", seed, "load seed")->default_val(0);
  generate->add_option("--out,-o", out_path, "output packet file")->required();

  auto* schedule = app.add_subcommand("schedule", "compute and lower a movement schedule");
  schedule->add_option("--in,-i", in_path, "input packet file")->required();
  schedule->add_option("--out,-o", out_path, "output schedule file")->required();
  add_schedule_options(schedule, sched_opts);

  auto* verify = app.add_subcommand("verify", "replay a schedule through the move simulator");
  verify->add_option("--grid,-g", grid_path, "packet file the schedule was made for")->required();
  verify->add_option("--schedule,-s", schedule_path, "schedule file")->required();

  auto* bench = app.add_subcommand("bench", "seed sweep with per-seed rows and aggregates");
  bench->add_option("--width,-w", width, "array side W (even)")->required();
  bench->add_option("--target,-t", target_side, "target side T (even)")->required();
  bench->add_option("--fill,-p", fill, "fill probability")->default_val(0.5);
  bench->add_option("--seed0", seed, "first seed")->default_val(0);
  bench->add_option("--seeds,-n", seed_count, "number of seeds")->default_val(100);
  bench->add_option("--out,-o", out_path, "write the report here instead of stdout");
  add_schedule_options(bench, bench_opts);

  auto* show = app.add_subcommand("show", "render a packet or schedule file");
  show->add_option("path", show_path, "file to render")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitBadInput;
  }

  try {
    if (generate->parsed()) {
      return cmd_generate(width, target_side, fill, seed, out_path);
    }
    if (schedule->parsed()) {
      return cmd_schedule(in_path, sched_opts, out_path);
    }
    if (verify->parsed()) {
      return cmd_verify(grid_path, schedule_path);
    }
    if (bench->parsed()) {
      return cmd_bench(width, target_side, fill, seed, seed_count, bench_opts, out_path);
    }
    if (show->parsed()) {
      return looks_like_packet_file(show_path) ? show_packet(show_path)
                                               : show_schedule(show_path);
    }
  } catch (const qrm::LoweringError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitVerificationFailure;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitBadInput;
  }
  return kExitBadInput;
}
