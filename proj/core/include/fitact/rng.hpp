#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace fitact {

/// splitmix64 scrambler; used to derive independent seeds from one base seed.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Folds a sequence of indices into a base seed. The derivation is pinned so
/// that (base, indices) always maps to the same stream, independent of
/// scheduling or platform.
inline std::uint64_t derive_seed(std::uint64_t base, std::initializer_list<std::uint64_t> indices) {
  std::uint64_t s = splitmix64(base);
  for (std::uint64_t i : indices) {
    s = splitmix64(s ^ (i + 0x9e3779b97f4a7c15ULL + (s << 6) + (s >> 2)));
  }
  return s;
}

inline std::mt19937_64 make_engine(std::uint64_t seed) { return std::mt19937_64(seed); }

}  // namespace fitact
