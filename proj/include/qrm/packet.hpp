#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "qrm/bitgrid.hpp"
#include "qrm/grid.hpp"
#include "qrm/types.hpp"

namespace qrm {

// Packetized bitfield: the occupancy grid as row-major bits, LSB-first in
// little-endian 64-bit words, 16 words (1024 bits) per packet, final packet
// zero-padded. A small header carries the grid side, the target side and the
// atom count so a stream is self-describing and checkable.

inline constexpr int kPacketBits = 1024;
inline constexpr int kWordsPerPacket = kPacketBits / 64;
inline constexpr char kPacketMagic[8] = {'Q', 'R', 'M', 'P', 'K', 'T', '0', '1'};

struct PacketStream {
  std::uint32_t width = 0;
  std::uint32_t target_side = 0;
  std::uint64_t atom_count = 0;
  std::vector<std::uint64_t> words; // kWordsPerPacket per packet

  std::size_t packet_count() const { return words.size() / kWordsPerPacket; }
};

inline std::size_t packet_count_for(int width) {
  const auto bits = static_cast<std::size_t>(width) * static_cast<std::size_t>(width);
  return (bits + kPacketBits - 1) / kPacketBits;
}

inline PacketStream pack_bitfield(const BitGrid& grid, TargetRegion target) {
  validate_target(grid.side(), target);
  PacketStream stream;
  stream.width = static_cast<std::uint32_t>(grid.side());
  stream.target_side = static_cast<std::uint32_t>(target.side);
  stream.atom_count = grid.popcount();
  stream.words.assign(packet_count_for(grid.side()) * kWordsPerPacket, 0);
  const auto words = grid.words();
  std::copy(words.begin(), words.end(), stream.words.begin());
  return stream;
}

/// Rebuild the grid, rejecting streams whose padding bits are set or whose
/// header disagrees with the payload.
inline BitGrid unpack_bitfield(const PacketStream& stream) {
  const int width = static_cast<int>(stream.width);
  if (width <= 0 || width % 2 != 0) {
    throw ParseError("packet stream: grid side must be a positive even number");
  }
  const TargetRegion target{static_cast<int>(stream.target_side)};
  if (target.side <= 0 || target.side % 2 != 0 || target.side > width) {
    throw ParseError("packet stream: bad target side");
  }
  if (stream.words.size() != packet_count_for(width) * kWordsPerPacket) {
    throw ParseError("packet stream: payload size does not match the header");
  }
  const auto bits = static_cast<std::size_t>(width) * static_cast<std::size_t>(width);
  const std::size_t grid_words = (bits + 63) / 64;
  for (std::size_t w = grid_words; w < stream.words.size(); ++w) {
    if (stream.words[w] != 0) {
      throw ParseError("packet stream: nonzero padding");
    }
  }
  if (bits % 64 != 0 && (stream.words[grid_words - 1] >> (bits % 64)) != 0) {
    throw ParseError("packet stream: nonzero padding");
  }
  BitGrid grid =
      BitGrid::from_words(width, {stream.words.data(), grid_words});
  if (grid.popcount() != stream.atom_count) {
    throw ParseError("packet stream: atom count does not match the payload");
  }
  return grid;
}

namespace detail {

inline void put_u32(std::ostream& os, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) {
    os.put(static_cast<char>((v >> (8 * i)) & 0xFF));
  }
}

inline void put_u64(std::ostream& os, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) {
    os.put(static_cast<char>((v >> (8 * i)) & 0xFF));
  }
}

inline std::uint32_t get_u32(std::istream& is) {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) {
    const int c = is.get();
    if (c == std::char_traits<char>::eof()) {
      throw ParseError("packet stream: truncated");
    }
    v |= static_cast<std::uint32_t>(c & 0xFF) << (8 * i);
  }
  return v;
}

inline std::uint64_t get_u64(std::istream& is) {
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) {
    const int c = is.get();
    if (c == std::char_traits<char>::eof()) {
      throw ParseError("packet stream: truncated");
    }
    v |= static_cast<std::uint64_t>(c & 0xFF) << (8 * i);
  }
  return v;
}

} // namespace detail

inline void write_packet_stream(std::ostream& os, const PacketStream& stream) {
  os.write(kPacketMagic, sizeof(kPacketMagic));
  detail::put_u32(os, stream.width);
  detail::put_u32(os, stream.target_side);
  detail::put_u64(os, stream.atom_count);
  for (const auto w : stream.words) {
    detail::put_u64(os, w);
  }
}

inline PacketStream read_packet_stream(std::istream& is) {
  char magic[sizeof(kPacketMagic)];
  is.read(magic, sizeof(magic));
  if (is.gcount() != sizeof(magic) || !std::equal(magic, magic + sizeof(magic), kPacketMagic)) {
    throw ParseError("packet stream: bad magic");
  }
  PacketStream stream;
  stream.width = detail::get_u32(is);
  stream.target_side = detail::get_u32(is);
  stream.atom_count = detail::get_u64(is);
  if (stream.width == 0 || stream.width % 2 != 0 || stream.width > 4096) {
    throw ParseError("packet stream: bad grid side");
  }
  const std::size_t words = packet_count_for(static_cast<int>(stream.width)) * kWordsPerPacket;
  stream.words.resize(words);
  for (auto& w : stream.words) {
    w = detail::get_u64(is);
  }
  if (is.peek() != std::char_traits<char>::eof()) {
    throw ParseError("packet stream: trailing bytes");
  }
  return stream;
}

inline void write_packet_file(const std::filesystem::path& path, const PacketStream& stream) {
  std::ofstream os(path, std::ios::binary);
  if (!os) {
    throw ParseError("cannot open " + path.string() + " for writing");
  }
  write_packet_stream(os, stream);
  if (!os) {
    throw ParseError("error while writing " + path.string());
  }
}

inline PacketStream read_packet_file(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) {
    throw ParseError("cannot open " + path.string());
  }
  return read_packet_stream(is);
}

} // namespace qrm
