#pragma once

#include <stdexcept>
#include <string>

namespace fitact {

/// Invalid or inconsistent configuration (activation parameters, config files,
/// layer setup).
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Tensor shape mismatch. The message always carries both offending shapes.
struct ShapeError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Filesystem-level failure (open/read/write).
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Structural problem in a serialized artifact (model file, fault log).
struct FormatError : std::runtime_error {
  enum class Kind { bad_magic, bad_version, truncated, bad_value };
  FormatError(Kind k, const std::string& msg) : std::runtime_error(msg), kind(k) {}
  Kind kind;
};

/// Dataset-level failure (empty set, missing manifest, unreadable image).
struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Non-finite or otherwise unusable numeric input.
struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Optimization failure (divergence, no checkpoint within the accuracy budget).
struct TrainingError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Fault injection targeting a nonexistent buffer/element/bit.
struct FaultError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace fitact
