#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "qrm/bitgrid.hpp"
#include "qrm/grid.hpp"
#include "qrm/types.hpp"

namespace qrm {

// Software model of the pipelined shift kernel. A line is scanned from its
// center-adjacent end (index 0); every scanned hole becomes a one-step shift
// command for everything beyond it, and every scanned bit is emitted into a
// column buffer, giving the row-to-column transpose as a side effect.

struct ScanResult {
  BitVec commands; // commands[i] = 1 iff a hole was scanned at index i and s_en allows it
  BitVec emitted;  // the scanned bits, in scan order (feeds the transpose buffer)
};

inline ScanResult scan_line(const BitVec& line, const BitVec& enable) {
  if (line.size() != enable.size()) {
    throw std::invalid_argument("line and enable mask lengths differ");
  }
  ScanResult res;
  res.commands.resize(line.size());
  res.emitted = line;
  for (std::size_t i = 0; i < line.size(); ++i) {
    res.commands[i] = static_cast<std::uint8_t>(!line[i] && enable[i]);
  }
  return res;
}

/// One executed command: where the hole sat when the shift ran, and whether
/// any atom actually moved (empty shifts are kept here and pruned when the
/// schedule is merged).
struct CommandExec {
  int scan_index = 0; // index in the command vector (original scan position)
  int hole_pos = 0;   // position of the hole when this command executed
  bool moved_atoms = false;
};

/// Apply a command vector to a line. Commands run in ascending scan order;
/// the command recorded at scan index i finds its hole at i minus the number
/// of commands already run, and shifts every atom strictly beyond that
/// position one step toward index 0. A command whose position no longer holds
/// a hole (possible only with commands not produced by scan_line) is skipped,
/// so the atom count is preserved unconditionally.
inline BitVec execute_commands(const BitVec& line, const BitVec& commands,
                               std::vector<CommandExec>* log = nullptr) {
  if (line.size() != commands.size()) {
    throw std::invalid_argument("line and command vector lengths differ");
  }
  BitVec cur = line;
  const int n = static_cast<int>(cur.size());
  int executed = 0;
  for (int i = 0; i < n; ++i) {
    if (!commands[i]) {
      continue;
    }
    const int pos = i - executed;
    ++executed;
    if (pos < 0 || pos >= n || cur[pos]) {
      continue;
    }
    bool moved = false;
    for (int x = pos + 1; x < n; ++x) {
      moved = moved || cur[x];
      cur[x - 1] = cur[x];
    }
    if (pos + 1 <= n - 1) {
      cur[n - 1] = 0;
    }
    if (log != nullptr) {
      log->push_back({i, pos, moved});
    }
  }
  return cur;
}

/// Result of compressing one quadrant along one axis: the updated quadrant,
/// the raw per-line command vectors, the per-line execution records, and the
/// transpose of the scanned (pre-shift) lines as accumulated by the column
/// buffers.
struct CompressPassResult {
  LocalQuadrant quadrant;
  std::vector<BitVec> commands;
  std::vector<std::vector<CommandExec>> executions;
  BitGrid transpose;
};

inline BitVec extract_line(const BitGrid& bits, Axis axis, int line) {
  const int n = bits.side();
  BitVec out(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) {
    out[static_cast<std::size_t>(k)] =
        axis == Axis::Rows ? bits.get(line, k) : bits.get(k, line);
  }
  return out;
}

inline void store_line(BitGrid& bits, Axis axis, int line, const BitVec& values) {
  const int n = bits.side();
  for (int k = 0; k < n; ++k) {
    if (axis == Axis::Rows) {
      bits.set(line, k, values[static_cast<std::size_t>(k)] != 0);
    } else {
      bits.set(k, line, values[static_cast<std::size_t>(k)] != 0);
    }
  }
}

/// Scan and execute every line of the quadrant along the given axis.
/// transpose(j, r) holds bit j of scanned line r.
inline CompressPassResult compress_pass(const LocalQuadrant& quadrant, Axis axis,
                                        const BitVec& enable) {
  const int qw = quadrant.side();
  if (static_cast<int>(enable.size()) != qw) {
    throw std::invalid_argument("enable mask length does not match quadrant side");
  }
  CompressPassResult res{quadrant, {}, {}, BitGrid(qw)};
  res.commands.reserve(static_cast<std::size_t>(qw));
  res.executions.resize(static_cast<std::size_t>(qw));
  for (int line = 0; line < qw; ++line) {
    const BitVec scanned = extract_line(res.quadrant.bits, axis, line);
    auto [commands, emitted] = scan_line(scanned, enable);
    for (int j = 0; j < qw; ++j) {
      res.transpose.set(j, line, emitted[static_cast<std::size_t>(j)] != 0);
    }
    const BitVec after =
        execute_commands(scanned, commands, &res.executions[static_cast<std::size_t>(line)]);
    store_line(res.quadrant.bits, axis, line, after);
    res.commands.push_back(std::move(commands));
  }
  return res;
}

inline BitVec full_enable(int qw) {
  return BitVec(static_cast<std::size_t>(qw), 1);
}

/// Enable mask that blocks shift commands at scan indices >= limit, keeping
/// activity near the center.
inline BitVec column_limit_enable(int qw, int limit) {
  BitVec mask(static_cast<std::size_t>(qw), 0);
  for (int i = 0; i < qw && i < limit; ++i) {
    mask[static_cast<std::size_t>(i)] = 1;
  }
  return mask;
}

// --- pipeline timing --------------------------------------------------------
//
// The kernel accepts a new line every cycle, so a pass over Q_w lines costs
// Q_w cycles plus the depth D of a single line; a row-then-column iteration
// costs 2*Q_w + D.

inline std::int64_t pass_latency(int quadrant_side, int line_depth) {
  if (quadrant_side <= 0 || line_depth <= 0) {
    throw std::invalid_argument("pipeline dimensions must be positive");
  }
  return static_cast<std::int64_t>(quadrant_side) + line_depth;
}

inline std::int64_t iteration_latency(int quadrant_side, int line_depth) {
  if (quadrant_side <= 0 || line_depth <= 0) {
    throw std::invalid_argument("pipeline dimensions must be positive");
  }
  return 2 * static_cast<std::int64_t>(quadrant_side) + line_depth;
}

struct PipelineTiming {
  int initiation_interval = 1; // lines accepted per cycle slot
  int line_depth = 1;          // D, cycles to process one line
  std::int64_t pass_cycles = 0;
  std::int64_t iteration_cycles = 0;
};

inline PipelineTiming pipeline_timing(int quadrant_side, int line_depth) {
  return {1, line_depth, pass_latency(quadrant_side, line_depth),
          iteration_latency(quadrant_side, line_depth)};
}

} // namespace qrm
