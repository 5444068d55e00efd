#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace qrm {

/// Row/column address of one trap site. Row 0 is the top row, column 0 the
/// leftmost column; the array is addressed row-major throughout.
struct SiteCoord {
  int row = 0;
  int col = 0;

  friend bool operator==(const SiteCoord&, const SiteCoord&) = default;
  friend auto operator<=>(const SiteCoord&, const SiteCoord&) = default;
};

/// Compass direction of a physical move on the global grid.
enum class Direction : std::uint8_t { North, South, East, West };

/// Scan orientation of a compression pass.
enum class Axis : std::uint8_t { Rows, Columns };

/// One of the four W/2 x W/2 sub-arrays around the array center.
enum class QuadrantId : std::uint8_t { NW, NE, SW, SE };

inline constexpr QuadrantId kAllQuadrants[] = {QuadrantId::NW, QuadrantId::NE,
                                               QuadrantId::SW, QuadrantId::SE};

constexpr int row_delta(Direction d) {
  switch (d) {
  case Direction::North: return -1;
  case Direction::South: return +1;
  default: return 0;
  }
}

constexpr int col_delta(Direction d) {
  switch (d) {
  case Direction::East: return +1;
  case Direction::West: return -1;
  default: return 0;
  }
}

constexpr char direction_char(Direction d) {
  switch (d) {
  case Direction::North: return 'N';
  case Direction::South: return 'S';
  case Direction::East: return 'E';
  default: return 'W';
  }
}

inline Direction direction_from_char(char c) {
  switch (c) {
  case 'N': return Direction::North;
  case 'S': return Direction::South;
  case 'E': return Direction::East;
  case 'W': return Direction::West;
  default: throw std::invalid_argument(std::string("unknown direction '") + c + "'");
  }
}

constexpr const char* axis_name(Axis a) {
  return a == Axis::Rows ? "row" : "col";
}

inline Axis axis_from_name(const std::string& s) {
  if (s == "row") return Axis::Rows;
  if (s == "col") return Axis::Columns;
  throw std::invalid_argument("unknown axis '" + s + "'");
}

constexpr const char* quadrant_name(QuadrantId q) {
  switch (q) {
  case QuadrantId::NW: return "NW";
  case QuadrantId::NE: return "NE";
  case QuadrantId::SW: return "SW";
  default: return "SE";
  }
}

/// Malformed input file or stream.
class ParseError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// A merged move could not be turned into physically valid tweezer moves.
class LoweringError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

} // namespace qrm
