#include "fitact/bounds.hpp"

#include <algorithm>
#include <numeric>

#include "fitact/backprop.hpp"
#include "fitact/errors.hpp"

namespace fitact {

Network relu_view(const Network& net) {
  Network out = net;
  for (Layer& l : out.layers) {
    if (l.activation.kind != ActivationKind::identity) {
      l.activation = ActivationConfig{ActivationKind::relu};
      l.lambda = FixedTensor{};
    }
  }
  return out;
}

std::map<std::size_t, std::vector<double>> collect_activation_maxima(const Network& net, const Dataset& ds) {
  if (ds.empty()) throw DataError("calibration needs a non-empty dataset");
  const Network view = relu_view(net);
  const RealParams params = decode_params(view);

  std::map<std::size_t, std::vector<double>> maxima;
  const std::vector<Shape> shapes = view.layer_output_shapes();
  for (std::size_t i = 0; i < view.layers.size(); ++i) {
    if (view.layers[i].activation.kind != ActivationKind::identity) {
      maxima.emplace(i, std::vector<double>(shape_size(shapes[i]), 0.0));
    }
  }

  const ActivationObserver observer = [&](std::size_t layer_index, const Tensor& activated) {
    std::vector<double>& mx = maxima.at(layer_index);
    const std::size_t batch = activated.shape()[0];
    const std::size_t sample = activated.size() / batch;
    const double* v = activated.data().data();
    for (std::size_t b = 0; b < batch; ++b) {
      const double* row = v + b * sample;
      for (std::size_t i = 0; i < sample; ++i) mx[i] = std::max(mx[i], row[i]);
    }
  };

  constexpr std::size_t kBatch = 64;
  std::vector<std::size_t> idx;
  for (std::size_t start = 0; start < ds.size(); start += kBatch) {
    idx.clear();
    for (std::size_t i = start; i < std::min(ds.size(), start + kBatch); ++i) idx.push_back(i);
    const Tensor batch = stack_batch(ds, idx);
    forward_real(view, params, batch, &observer, nullptr);
  }

  for (auto& [layer, mx] : maxima) {
    (void)layer;
    for (double& v : mx) v = std::max(v, kBoundFloor);
  }
  return maxima;
}

BoundStore calibrate_bounds(const Network& net, const Dataset& ds) {
  const std::map<std::size_t, std::vector<double>> maxima = collect_activation_maxima(net, ds);
  const std::vector<Shape> shapes = net.layer_output_shapes();

  BoundStore store;
  for (const auto& [layer_index, mx] : maxima) {
    const Shape& out_shape = shapes[layer_index];
    Tensor bounds;
    if (net.granularity == BoundGranularity::per_neuron || out_shape.size() == 1) {
      bounds = Tensor(net.bound_shape(layer_index), std::vector<double>(mx));
    } else {
      // one bound per channel: max over the channel's spatial positions
      const std::size_t channels = out_shape[0];
      const std::size_t plane = out_shape[1] * out_shape[2];
      bounds = Tensor({channels});
      for (std::size_t c = 0; c < channels; ++c) {
        double m = 0.0;
        for (std::size_t i = 0; i < plane; ++i) m = std::max(m, mx[c * plane + i]);
        bounds[c] = m;
      }
    }
    store.per_layer.push_back({layer_index, FixedTensor::encode(bounds)});
  }
  return store;
}

}  // namespace fitact
