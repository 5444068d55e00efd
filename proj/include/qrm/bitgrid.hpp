#pragma once

#include <bit>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "qrm/types.hpp"

namespace qrm {

/// One row or column of a quadrant as 0/1 values. Index 0 is the end nearest
/// the array center (the first bit the shift kernel scans).
using BitVec = std::vector<std::uint8_t>;

inline std::size_t popcount(const BitVec& v) {
  return std::accumulate(v.begin(), v.end(), std::size_t{0},
                         [](std::size_t n, std::uint8_t b) { return n + (b ? 1 : 0); });
}

/// Square bit matrix backed by 64-bit words. Site (r,c) maps to flat bit
/// index r*side+c, stored LSB-first inside word index/64 — the same layout
/// the 1024-bit packet stream uses, so packing is a word copy.
/// Bits past side*side stay zero.
class BitGrid {
public:
  BitGrid() = default;

  explicit BitGrid(int side) : side_(side) {
    if (side <= 0) {
      throw std::invalid_argument("grid side must be positive, got " + std::to_string(side));
    }
    const auto bits = static_cast<std::size_t>(side) * static_cast<std::size_t>(side);
    words_.assign((bits + 63) / 64, 0);
  }

  int side() const { return side_; }
  std::size_t site_count() const {
    return static_cast<std::size_t>(side_) * static_cast<std::size_t>(side_);
  }

  bool in_bounds(SiteCoord s) const {
    return s.row >= 0 && s.row < side_ && s.col >= 0 && s.col < side_;
  }

  bool get(int row, int col) const {
    check(row, col);
    const auto i = index(row, col);
    return (words_[i >> 6] >> (i & 63)) & 1U;
  }
  bool get(SiteCoord s) const { return get(s.row, s.col); }

  void set(int row, int col, bool value) {
    check(row, col);
    const auto i = index(row, col);
    const std::uint64_t mask = std::uint64_t{1} << (i & 63);
    if (value) {
      words_[i >> 6] |= mask;
    } else {
      words_[i >> 6] &= ~mask;
    }
  }
  void set(SiteCoord s, bool value) { set(s.row, s.col, value); }

  std::size_t popcount() const {
    std::size_t n = 0;
    for (const auto w : words_) {
      n += static_cast<std::size_t>(std::popcount(w));
    }
    return n;
  }

  /// Raw word storage, LSB-first flat bit order. Used by the packet codec.
  std::span<const std::uint64_t> words() const { return words_; }

  /// Rebuild from raw words; bits past side*side must be zero.
  static BitGrid from_words(int side, std::span<const std::uint64_t> words) {
    BitGrid g(side);
    if (words.size() != g.words_.size()) {
      throw std::invalid_argument("word count does not match grid size");
    }
    std::copy(words.begin(), words.end(), g.words_.begin());
    const auto bits = g.site_count();
    if (bits % 64 != 0 && (g.words_.back() >> (bits % 64)) != 0) {
      throw std::invalid_argument("nonzero bits past the end of the grid");
    }
    return g;
  }

  friend bool operator==(const BitGrid&, const BitGrid&) = default;

  /// ASCII rendering, one row per line, row 0 on top.
  std::string render() const {
    std::string out;
    for (int r = 0; r < side_; ++r) {
      for (int c = 0; c < side_; ++c) {
        out += get(r, c) ? "●" : "·";
      }
      out += '\n';
    }
    return out;
  }

private:
  std::size_t index(int row, int col) const {
    return static_cast<std::size_t>(row) * static_cast<std::size_t>(side_) +
           static_cast<std::size_t>(col);
  }

  void check(int row, int col) const {
    if (row < 0 || row >= side_ || col < 0 || col >= side_) {
      throw std::out_of_range("site (" + std::to_string(row) + "," + std::to_string(col) +
                              ") outside " + std::to_string(side_) + "x" +
                              std::to_string(side_) + " grid");
    }
  }

  int side_ = 0;
  std::vector<std::uint64_t> words_;
};

} // namespace qrm
