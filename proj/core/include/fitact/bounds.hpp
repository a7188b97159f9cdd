#pragma once

#include <map>
#include <vector>

#include "fitact/dataset.hpp"
#include "fitact/network.hpp"

namespace fitact {

/// Bounds below this are snapped up so that never-activated neurons still get
/// a positive value.
inline constexpr double kBoundFloor = 1e-3;

/// Calibrated per-neuron bound buffers, one entry per bounded-activation
/// layer, stored in the same Q15.16 words the fault injector targets.
struct BoundStore {
  struct Entry {
    std::size_t layer_index = 0;
    FixedTensor bounds;
  };
  std::vector<Entry> per_layer;

  std::size_t total_count() const {
    std::size_t n = 0;
    for (const Entry& e : per_layer) n += e.bounds.size();
    return n;
  }
};

/// Copy of the network with every non-identity activation replaced by plain
/// ReLU and bound buffers dropped; the unbounded view calibration observes.
Network relu_view(const Network& net);

/// Maximum ReLU output of every neuron over the dataset, per activation
/// layer, floored at kBoundFloor. Keyed by layer index; always per-neuron.
std::map<std::size_t, std::vector<double>> collect_activation_maxima(const Network& net, const Dataset& ds);

/// Initializes one bound per neuron (or per channel, following the network's
/// granularity) to its maximum fault-free ReLU output over the dataset.
BoundStore calibrate_bounds(const Network& net, const Dataset& ds);

}  // namespace fitact
