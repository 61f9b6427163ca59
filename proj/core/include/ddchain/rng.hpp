#pragma once

#include <cstdint>
#include <initializer_list>

namespace ddchain {

constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Order-sensitive hash of a key tuple.
constexpr std::uint64_t hash_key(std::initializer_list<std::uint64_t> parts) {
  std::uint64_t h = 0x243f6a8885a308d3ULL;
  for (std::uint64_t p : parts) h = splitmix64(h ^ splitmix64(p));
  return h;
}

// Counter-based uniform in [0, 1): the same key always yields the same draw,
// which is what lets two policies see identical dropout and knockout events.
constexpr double hash_uniform(std::initializer_list<std::uint64_t> parts) {
  return static_cast<double>(hash_key(parts) >> 11) * 0x1.0p-53;
}

}  // namespace ddchain
