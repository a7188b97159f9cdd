#pragma once

#include <cstddef>
#include <cstdint>

namespace fitact {

/// FNV-1a over raw bytes; stable across runs, used for buffer fingerprints.
inline std::uint64_t fnv1a64(const void* data, std::size_t bytes, std::uint64_t h = 0xcbf29ce484222325ULL) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < bytes; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace fitact
