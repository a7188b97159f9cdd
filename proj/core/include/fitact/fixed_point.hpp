#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

#include "fitact/errors.hpp"

namespace fitact {

/// Q15.16 signed fixed-point scalar: 1 sign bit, 15 integral bits, 16
/// fractional bits in a two's complement 32-bit word. This is the storage
/// format of every fault-injectable parameter; arithmetic elsewhere runs in
/// double precision.
struct FixedPoint32 {
  std::uint32_t raw_bits = 0;

  friend bool operator==(FixedPoint32 a, FixedPoint32 b) { return a.raw_bits == b.raw_bits; }
  friend bool operator!=(FixedPoint32 a, FixedPoint32 b) { return a.raw_bits != b.raw_bits; }
};

inline constexpr double kFixedScale = 65536.0;  // 2^16
inline constexpr double kFixedMax = 2147483647.0 / kFixedScale;   // 32767.99998...
inline constexpr double kFixedMin = -2147483648.0 / kFixedScale;  // -32768.0
inline constexpr double kFixedResolution = 1.0 / kFixedScale;

/// Nearest representable Q15.16 value, saturating at the range ends.
inline FixedPoint32 encode_fixed(double v) {
  if (!std::isfinite(v)) {
    throw NumericError("encode_fixed: non-finite input " + std::to_string(v));
  }
  double scaled = std::round(v * kFixedScale);
  std::int32_t raw;
  if (scaled >= 2147483647.0) {
    raw = INT32_MAX;
  } else if (scaled <= -2147483648.0) {
    raw = INT32_MIN;
  } else {
    raw = static_cast<std::int32_t>(scaled);
  }
  return FixedPoint32{static_cast<std::uint32_t>(raw)};
}

/// Exact value of the stored word: two's complement interpretation / 2^16.
inline double decode_fixed(FixedPoint32 f) {
  return static_cast<double>(static_cast<std::int32_t>(f.raw_bits)) / kFixedScale;
}

/// Returns a copy with exactly one bit toggled.
inline FixedPoint32 flip_bit(FixedPoint32 f, int bit_position) {
  if (bit_position < 0 || bit_position >= 32) {
    throw FaultError("flip_bit: bit position " + std::to_string(bit_position) + " outside [0,32)");
  }
  return FixedPoint32{f.raw_bits ^ (1u << bit_position)};
}

}  // namespace fitact
