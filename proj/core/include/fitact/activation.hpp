#pragma once

#include <cmath>
#include <string>

#include "fitact/errors.hpp"

namespace fitact {

enum class ActivationKind { identity, relu, gbrelu, fitrelu_naive, fitrelu };

/// What a globally bounded ReLU does with over-bound values: squash them to
/// zero, or truncate them to the bound.
enum class GBReluMode { squash_to_zero, clamp_to_bound };

std::string to_string(ActivationKind k);
std::string to_string(GBReluMode m);
ActivationKind activation_kind_from_string(const std::string& s);
GBReluMode gbrelu_mode_from_string(const std::string& s);

/// Per-layer activation configuration. Per-neuron bound values live in the
/// owning layer's lambda buffer, not here.
struct ActivationConfig {
  ActivationKind kind = ActivationKind::identity;
  GBReluMode mode = GBReluMode::squash_to_zero;
  double global_bound = 0.0;  // gbrelu only
  double slope = 10.0;        // fitrelu only, the gate steepness k

  void validate() const;
  bool per_neuron_bounded() const {
    return kind == ActivationKind::fitrelu || kind == ActivationKind::fitrelu_naive;
  }
};

namespace detail {

// Unchecked kernels. Inference must stay total even when a bit flip has made a
// stored bound negative, so no validation happens here.

inline double relu(double x) { return x > 0.0 ? x : 0.0; }

inline double gbrelu(double x, double bound, GBReluMode mode) {
  if (mode == GBReluMode::clamp_to_bound) {
    return x <= 0.0 ? 0.0 : (x < bound ? x : bound);
  }
  return (x > 0.0 && x <= bound) ? x : 0.0;
}

inline double fitrelu_naive(double x, double bound) { return (x > 0.0 && x <= bound) ? x : 0.0; }

// Logistic gate sigma(k*(bound - x)), clamped to {0,1} once the argument
// leaves [-50, 50] so the exponential never overflows.
inline double bound_gate(double x, double bound, double k) {
  const double t = k * (bound - x);
  if (t >= 50.0) return 1.0;
  if (t <= -50.0) return 0.0;
  if (t >= 0.0) return 1.0 / (1.0 + std::exp(-t));
  const double e = std::exp(t);
  return e / (1.0 + e);
}

inline double fitrelu(double x, double bound, double k) {
  if (x <= 0.0) return 0.0;
  const double inner = x * bound_gate(x, bound, k);
  return inner > 0.0 ? inner : 0.0;
}

inline double fitrelu_grad_lambda(double x, double bound, double k) {
  if (x <= 0.0) return 0.0;
  const double s = bound_gate(x, bound, k);
  if (s <= 0.0) return 0.0;  // outer max inactive
  return x * k * s * (1.0 - s);
}

inline double fitrelu_grad_x(double x, double bound, double k) {
  if (x <= 0.0) return 0.0;
  const double s = bound_gate(x, bound, k);
  if (s <= 0.0) return 0.0;
  return s - x * k * s * (1.0 - s);
}

}  // namespace detail

inline double relu(double x) { return detail::relu(x); }

inline double gbrelu(double x, double bound, GBReluMode mode) {
  if (bound <= 0.0) throw ConfigError("gbrelu: bound must be positive, got " + std::to_string(bound));
  return detail::gbrelu(x, bound, mode);
}

inline double fitrelu_naive(double x, double bound) {
  if (bound <= 0.0) throw ConfigError("fitrelu_naive: bound must be positive, got " + std::to_string(bound));
  return detail::fitrelu_naive(x, bound);
}

/// Smooth neuron-wise bounded ReLU: max(0, x * sigma(k * (bound - x))).
/// Passes values in (0, bound], squashes over-bound values toward zero, and
/// converges pointwise to fitrelu_naive as k grows.
inline double fitrelu(double x, double bound, double k) {
  if (bound <= 0.0) throw ConfigError("fitrelu: bound must be positive, got " + std::to_string(bound));
  if (k <= 0.0) throw ConfigError("fitrelu: slope must be positive, got " + std::to_string(k));
  return detail::fitrelu(x, bound, k);
}

/// d fitrelu / d bound, zero where the outer max is inactive.
inline double fitrelu_grad_lambda(double x, double bound, double k) {
  if (bound <= 0.0) throw ConfigError("fitrelu_grad_lambda: bound must be positive");
  if (k <= 0.0) throw ConfigError("fitrelu_grad_lambda: slope must be positive");
  return detail::fitrelu_grad_lambda(x, bound, k);
}

/// d fitrelu / d x, zero where the outer max is inactive.
inline double fitrelu_grad_x(double x, double bound, double k) {
  if (bound <= 0.0) throw ConfigError("fitrelu_grad_x: bound must be positive");
  if (k <= 0.0) throw ConfigError("fitrelu_grad_x: slope must be positive");
  return detail::fitrelu_grad_x(x, bound, k);
}

}  // namespace fitact
