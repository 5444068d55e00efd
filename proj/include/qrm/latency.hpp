#pragma once

#include <cstdint>
#include <stdexcept>

#include "qrm/grid.hpp"
#include "qrm/shift_kernel.hpp"

namespace qrm {

/// Knobs of the pipeline cycle model. The defaults mirror the hardware
/// deployment the model is anchored against: a 250 MHz clock, 1024-bit
/// transfer packets, and a per-line depth equal to the quadrant side (one
/// scanned bit per cycle). The model is indicative, not a measurement; the
/// knobs are exposed so assumptions stay visible.
struct LatencyModel {
  double clock_hz = 250.0e6;
  int line_depth = 0; // D in cycles; 0 picks Q_w
  int packet_bits = 1024;
  bool include_io = false;
  int cycles_per_move_record = 1;
};

struct CycleEstimate {
  std::uint64_t input_packets = 0;
  std::uint64_t compute_cycles = 0;
  std::uint64_t output_cycles = 0;
  std::uint64_t total_cycles = 0;
  double wall_seconds = 0.0;
};

/// Cycle estimate for rearranging a W x W array: each iteration costs one
/// row pass plus one column pass of the pipelined kernel (2*Q_w + D cycles),
/// I/O costs one cycle per 1024-bit packet in, and one per packet plus one
/// per recorded move out. I/O is only added with include_io.
inline CycleEstimate estimate(int width, int iterations, const LatencyModel& model = {},
                              std::uint64_t move_records = 0) {
  validate_grid_side(width);
  if (iterations < 1) {
    throw std::invalid_argument("iterations must be >= 1");
  }
  if (model.clock_hz <= 0.0) {
    throw std::invalid_argument("clock frequency must be positive");
  }
  if (model.packet_bits != 1024) {
    throw std::invalid_argument("packet width is fixed at 1024 bits");
  }
  if (model.line_depth < 0 || model.cycles_per_move_record < 0) {
    throw std::invalid_argument("latency model fields must be non-negative");
  }
  const int qw = width / 2;
  const int depth = model.line_depth > 0 ? model.line_depth : qw;

  CycleEstimate est;
  const auto bits = static_cast<std::uint64_t>(width) * static_cast<std::uint64_t>(width);
  est.input_packets = (bits + 1023) / 1024;
  est.compute_cycles =
      static_cast<std::uint64_t>(iterations) * static_cast<std::uint64_t>(iteration_latency(qw, depth));
  est.output_cycles =
      est.input_packets + move_records * static_cast<std::uint64_t>(model.cycles_per_move_record);
  est.total_cycles = est.compute_cycles;
  if (model.include_io) {
    est.total_cycles += est.input_packets + est.output_cycles;
  }
  est.wall_seconds = static_cast<double>(est.total_cycles) / model.clock_hz;
  return est;
}

} // namespace qrm
