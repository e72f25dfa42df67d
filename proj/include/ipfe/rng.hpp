#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace ipfe {

/// SplitMix64 finaliser (Steele, Lea, Flood 2014).
constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Order-sensitive hash of a key tuple, used to derive independent stream
/// seeds: seed = derive_seed({master, realization, slab}).
constexpr std::uint64_t derive_seed(std::initializer_list<std::uint64_t> keys) {
  std::uint64_t h = 0x6a09e667f3bcc908ULL;
  for (auto k : keys)
    h = splitmix64(h ^ splitmix64(k));
  return h;
}

/// Per-stream engine: 64-bit Mersenne Twister seeded from a derived seed.
using Engine = std::mt19937_64;

} // namespace ipfe
