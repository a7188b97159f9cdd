#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "fitact/errors.hpp"

namespace fitact {

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

/// First/second moment accumulators for one parameter vector.
struct AdamState {
  std::size_t t = 0;
  std::vector<double> m, v;

  AdamState() = default;
  explicit AdamState(std::size_t n) : m(n, 0.0), v(n, 0.0) {}
};

/// One bias-corrected update, in place.
inline void adam_step(std::vector<double>& params, const std::vector<double>& grads, AdamState& state,
                      const AdamConfig& cfg) {
  if (params.size() != grads.size() || params.size() != state.m.size()) {
    throw ShapeError("adam_step: parameter/gradient/state sizes disagree");
  }
  state.t += 1;
  const double c1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(state.t));
  const double c2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(state.t));
  for (std::size_t i = 0; i < params.size(); ++i) {
    const double g = grads[i];
    state.m[i] = cfg.beta1 * state.m[i] + (1.0 - cfg.beta1) * g;
    state.v[i] = cfg.beta2 * state.v[i] + (1.0 - cfg.beta2) * g * g;
    const double mhat = state.m[i] / c1;
    const double vhat = state.v[i] / c2;
    params[i] -= cfg.lr * mhat / (std::sqrt(vhat) + cfg.eps);
  }
}

}  // namespace fitact
