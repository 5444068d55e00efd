#pragma once

#include <charconv>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "qrm/aod.hpp"
#include "qrm/grid.hpp"
#include "qrm/scheduler.hpp"
#include "qrm/types.hpp"

namespace qrm {

// Line-delimited text schedule. One move record per lowered tweezer move,
// then the per-atom traces, then any residual target holes, then a summary:
//
//   qrmsched 1
//   grid W=8 T=4 atoms=33
//   move 0 iter=1 axis=row dir=E steps=1 rows=2,5 cols=0-2
//   trace origin=(0,1) hops=E1,S2 final=(1,3)
//   hole (3,4)
//   summary iterations=2 success=1 moves=1 residual=1
//
// The format is diffable on purpose; the packet stream stays the only binary
// artifact.

struct ScheduleFileData {
  int width = 0;
  TargetRegion target;
  std::size_t atom_count = 0;
  std::vector<TweezerMove> moves;
  std::vector<AtomTrace> traces;
  std::vector<SiteCoord> residual_holes;
  int iterations = 0;
  bool success = false;

  friend bool operator==(const ScheduleFileData&, const ScheduleFileData&) = default;
};

namespace detail {

inline std::string format_index_set(const std::vector<int>& xs) {
  std::string out;
  for (std::size_t i = 0; i < xs.size();) {
    std::size_t j = i;
    while (j + 1 < xs.size() && xs[j + 1] == xs[j] + 1) {
      ++j;
    }
    if (!out.empty()) {
      out += ',';
    }
    out += std::to_string(xs[i]);
    if (j > i) {
      out += '-';
      out += std::to_string(xs[j]);
    }
    i = j + 1;
  }
  return out;
}

inline int parse_int(std::string_view text, const char* what) {
  int value = 0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc{} || ptr != end) {
    throw ParseError(std::string("schedule: bad ") + what + " '" + std::string(text) + "'");
  }
  return value;
}

inline std::vector<int> parse_index_set(std::string_view text) {
  std::vector<int> out;
  std::size_t pos = 0;
  while (pos < text.size()) {
    const std::size_t comma = text.find(',', pos);
    const std::string_view token =
        text.substr(pos, comma == std::string_view::npos ? text.size() - pos : comma - pos);
    const std::size_t dash = token.find('-');
    if (dash == std::string_view::npos) {
      out.push_back(parse_int(token, "index"));
    } else {
      const int a = parse_int(token.substr(0, dash), "range start");
      const int b = parse_int(token.substr(dash + 1), "range end");
      if (b < a) {
        throw ParseError("schedule: descending index range");
      }
      for (int x = a; x <= b; ++x) {
        out.push_back(x);
      }
    }
    if (comma == std::string_view::npos) {
      break;
    }
    pos = comma + 1;
  }
  for (std::size_t i = 0; i + 1 < out.size(); ++i) {
    if (out[i] >= out[i + 1]) {
      throw ParseError("schedule: index set not strictly increasing");
    }
  }
  if (out.empty()) {
    throw ParseError("schedule: empty index set");
  }
  return out;
}

inline std::string format_site(SiteCoord s) {
  return "(" + std::to_string(s.row) + "," + std::to_string(s.col) + ")";
}

inline SiteCoord parse_site(std::string_view text) {
  if (text.size() < 5 || text.front() != '(' || text.back() != ')') {
    throw ParseError("schedule: bad site '" + std::string(text) + "'");
  }
  const std::size_t comma = text.find(',');
  if (comma == std::string_view::npos) {
    throw ParseError("schedule: bad site '" + std::string(text) + "'");
  }
  return {parse_int(text.substr(1, comma - 1), "site row"),
          parse_int(text.substr(comma + 1, text.size() - comma - 2), "site col")};
}

inline std::string format_hops(const std::vector<std::pair<Direction, int>>& hops) {
  if (hops.empty()) {
    return "-";
  }
  std::string out;
  for (const auto& [dir, steps] : hops) {
    if (!out.empty()) {
      out += ',';
    }
    out += direction_char(dir);
    out += std::to_string(steps);
  }
  return out;
}

inline std::vector<std::pair<Direction, int>> parse_hops(std::string_view text) {
  std::vector<std::pair<Direction, int>> hops;
  if (text == "-") {
    return hops;
  }
  std::size_t pos = 0;
  while (pos < text.size()) {
    const std::size_t comma = text.find(',', pos);
    const std::string_view token =
        text.substr(pos, comma == std::string_view::npos ? text.size() - pos : comma - pos);
    if (token.size() < 2) {
      throw ParseError("schedule: bad hop '" + std::string(token) + "'");
    }
    const Direction dir = direction_from_char(token.front());
    const int steps = parse_int(token.substr(1), "hop steps");
    if (steps <= 0) {
      throw ParseError("schedule: hop steps must be positive");
    }
    hops.emplace_back(dir, steps);
    if (comma == std::string_view::npos) {
      break;
    }
    pos = comma + 1;
  }
  return hops;
}

inline std::string_view expect_kv(std::string_view token, std::string_view key) {
  if (token.size() <= key.size() + 1 || token.substr(0, key.size()) != key ||
      token[key.size()] != '=') {
    throw ParseError("schedule: expected " + std::string(key) + "=..., got '" +
                     std::string(token) + "'");
  }
  return token.substr(key.size() + 1);
}

inline std::vector<std::string> split_tokens(const std::string& line) {
  std::vector<std::string> tokens;
  std::istringstream is(line);
  std::string token;
  while (is >> token) {
    tokens.push_back(token);
  }
  return tokens;
}

} // namespace detail

inline std::string serialize_schedule(const ScheduleFileData& data) {
  std::ostringstream os;
  os << "qrmsched 1\n";
  os << "grid W=" << data.width << " T=" << data.target.side << " atoms=" << data.atom_count
     << "\n";
  for (const auto& m : data.moves) {
    os << "move " << m.ordinal << " iter=" << m.iteration << " axis=" << axis_name(m.axis)
       << " dir=" << direction_char(m.direction) << " steps=" << m.steps
       << " rows=" << detail::format_index_set(m.rows)
       << " cols=" << detail::format_index_set(m.cols) << "\n";
  }
  for (const auto& t : data.traces) {
    os << "trace origin=" << detail::format_site(t.origin)
       << " hops=" << detail::format_hops(t.hops)
       << " final=" << detail::format_site(t.final_site) << "\n";
  }
  for (const auto& h : data.residual_holes) {
    os << "hole " << detail::format_site(h) << "\n";
  }
  os << "summary iterations=" << data.iterations << " success=" << (data.success ? 1 : 0)
     << " moves=" << data.moves.size() << " residual=" << data.residual_holes.size() << "\n";
  return os.str();
}

inline ScheduleFileData parse_schedule(std::istream& is) {
  ScheduleFileData data;
  std::string line;
  if (!std::getline(is, line) || line != "qrmsched 1") {
    throw ParseError("schedule: missing 'qrmsched 1' header");
  }
  if (!std::getline(is, line)) {
    throw ParseError("schedule: missing grid line");
  }
  {
    const auto tokens = detail::split_tokens(line);
    if (tokens.size() != 4 || tokens[0] != "grid") {
      throw ParseError("schedule: bad grid line");
    }
    data.width = detail::parse_int(detail::expect_kv(tokens[1], "W"), "grid side");
    data.target.side = detail::parse_int(detail::expect_kv(tokens[2], "T"), "target side");
    data.atom_count = static_cast<std::size_t>(
        detail::parse_int(detail::expect_kv(tokens[3], "atoms"), "atom count"));
    validate_target(data.width, data.target);
  }
  bool have_summary = false;
  std::size_t summary_moves = 0;
  std::size_t summary_residual = 0;
  int last_ordinal = -1;
  while (std::getline(is, line)) {
    if (line.empty()) {
      continue;
    }
    if (have_summary) {
      throw ParseError("schedule: records after the summary");
    }
    const auto tokens = detail::split_tokens(line);
    if (tokens[0] == "move") {
      if (tokens.size() != 8) {
        throw ParseError("schedule: bad move record");
      }
      TweezerMove m;
      m.ordinal = detail::parse_int(tokens[1], "move ordinal");
      if (m.ordinal <= last_ordinal) {
        throw ParseError("schedule: move ordinals must increase");
      }
      last_ordinal = m.ordinal;
      m.iteration = detail::parse_int(detail::expect_kv(tokens[2], "iter"), "iteration");
      m.axis = axis_from_name(std::string(detail::expect_kv(tokens[3], "axis")));
      const auto dir = detail::expect_kv(tokens[4], "dir");
      if (dir.size() != 1) {
        throw ParseError("schedule: bad direction");
      }
      m.direction = direction_from_char(dir.front());
      m.steps = detail::parse_int(detail::expect_kv(tokens[5], "steps"), "steps");
      m.rows = detail::parse_index_set(detail::expect_kv(tokens[6], "rows"));
      m.cols = detail::parse_index_set(detail::expect_kv(tokens[7], "cols"));
      validate_move_shape(m);
      data.moves.push_back(std::move(m));
    } else if (tokens[0] == "trace") {
      if (tokens.size() != 4) {
        throw ParseError("schedule: bad trace record");
      }
      AtomTrace t;
      t.origin = detail::parse_site(detail::expect_kv(tokens[1], "origin"));
      t.hops = detail::parse_hops(detail::expect_kv(tokens[2], "hops"));
      t.final_site = detail::parse_site(detail::expect_kv(tokens[3], "final"));
      data.traces.push_back(std::move(t));
    } else if (tokens[0] == "hole") {
      if (tokens.size() != 2) {
        throw ParseError("schedule: bad hole record");
      }
      data.residual_holes.push_back(detail::parse_site(tokens[1]));
    } else if (tokens[0] == "summary") {
      if (tokens.size() != 5) {
        throw ParseError("schedule: bad summary record");
      }
      data.iterations =
          detail::parse_int(detail::expect_kv(tokens[1], "iterations"), "iterations");
      data.success =
          detail::parse_int(detail::expect_kv(tokens[2], "success"), "success flag") != 0;
      summary_moves = static_cast<std::size_t>(
          detail::parse_int(detail::expect_kv(tokens[3], "moves"), "move count"));
      summary_residual = static_cast<std::size_t>(
          detail::parse_int(detail::expect_kv(tokens[4], "residual"), "residual count"));
      have_summary = true;
    } else {
      throw ParseError("schedule: unknown record '" + tokens[0] + "'");
    }
  }
  if (!have_summary) {
    throw ParseError("schedule: missing summary");
  }
  if (summary_moves != data.moves.size()) {
    throw ParseError("schedule: summary move count does not match the records");
  }
  if (summary_residual != data.residual_holes.size()) {
    throw ParseError("schedule: summary residual count does not match the records");
  }
  return data;
}

inline ScheduleFileData parse_schedule(const std::string& text) {
  std::istringstream is(text);
  return parse_schedule(is);
}

inline void write_schedule_file(const std::filesystem::path& path, const ScheduleFileData& data) {
  std::ofstream os(path);
  if (!os) {
    throw ParseError("cannot open " + path.string() + " for writing");
  }
  os << serialize_schedule(data);
  if (!os) {
    throw ParseError("error while writing " + path.string());
  }
}

inline ScheduleFileData read_schedule_file(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) {
    throw ParseError("cannot open " + path.string());
  }
  return parse_schedule(is);
}

/// Assemble the file payload for a finished scheduling run.
inline ScheduleFileData make_schedule_file(const BitGrid& initial, TargetRegion target,
                                           const ScheduleResult& result,
                                           std::vector<TweezerMove> lowered) {
  ScheduleFileData data;
  data.width = initial.side();
  data.target = target;
  data.atom_count = initial.popcount();
  data.moves = std::move(lowered);
  data.traces = result.traces;
  data.residual_holes = result.residual_holes;
  data.iterations = result.iterations_used;
  data.success = result.success;
  return data;
}

} // namespace qrm
