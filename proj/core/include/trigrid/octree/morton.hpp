#pragma once

#include <array>
#include <cstdint>

namespace trigrid::morton {

// Spreads the low 21 bits of v so that two zero bits follow each bit.
constexpr std::uint64_t spread(std::uint64_t v) {
  v &= 0x1fffff;
  v = (v | v << 32) & 0x1f00000000ffffull;
  v = (v | v << 16) & 0x1f0000ff0000ffull;
  v = (v | v << 8) & 0x100f00f00f00f00full;
  v = (v | v << 4) & 0x10c30c30c30c30c3ull;
  v = (v | v << 2) & 0x1249249249249249ull;
  return v;
}

constexpr std::uint64_t compact(std::uint64_t v) {
  v &= 0x1249249249249249ull;
  v = (v ^ (v >> 2)) & 0x10c30c30c30c30c3ull;
  v = (v ^ (v >> 4)) & 0x100f00f00f00f00full;
  v = (v ^ (v >> 8)) & 0x1f0000ff0000ffull;
  v = (v ^ (v >> 16)) & 0x1f00000000ffffull;
  v = (v ^ (v >> 32)) & 0x1fffff;
  return v;
}

// x occupies the lowest bit of each triple.
constexpr std::uint64_t encode(std::uint32_t x, std::uint32_t y, std::uint32_t z) {
  return spread(x) | spread(y) << 1 | spread(z) << 2;
}

constexpr std::array<std::uint32_t, 3> decode(std::uint64_t code) {
  return {static_cast<std::uint32_t>(compact(code)), static_cast<std::uint32_t>(compact(code >> 1)),
          static_cast<std::uint32_t>(compact(code >> 2))};
}

}  // namespace trigrid::morton
