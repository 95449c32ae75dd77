#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace turbofade {

using Rng = std::mt19937_64;

inline uint64_t splitmix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

/// Deterministic child seed for stream `path` under `seed`.
inline uint64_t derive_seed(uint64_t seed, std::initializer_list<uint64_t> path) {
  uint64_t h = splitmix64(seed);
  for (uint64_t p : path) h = splitmix64(h ^ splitmix64(p + 0x632be59bd9b4e019ull));
  return h;
}

}  // namespace turbofade
