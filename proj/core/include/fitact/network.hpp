#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fitact/activation.hpp"
#include "fitact/tensor.hpp"

namespace fitact {

enum class LayerKind { dense, conv2d, maxpool2d, flatten };

std::string to_string(LayerKind k);

/// Whether each neuron carries its own bound value, or one bound is shared per
/// output channel (memory-constrained option for conv layers).
enum class BoundGranularity { per_neuron, per_channel };

/// One node of the feed-forward graph. Parameters are stored as Q15.16 words;
/// every forward pass decodes them, so bit flips applied to the stored words
/// take effect immediately.
struct Layer {
  LayerKind kind = LayerKind::dense;
  FixedTensor weights;  // dense (out,in); conv (oc,ic,kh,kw)
  FixedTensor bias;     // dense (out); conv (oc)
  FixedTensor lambda;   // per-neuron bounds, present for fitrelu kinds only
  ActivationConfig activation;
  int stride = 1;
  int padding = 0;
  int window = 2;  // maxpool2d

  bool has_params() const { return !weights.empty() || !bias.empty() || !lambda.empty(); }
};

/// Ordered feed-forward layer graph over a fixed input shape.
struct Network {
  Shape input_shape;
  std::vector<Layer> layers;
  BoundGranularity granularity = BoundGranularity::per_neuron;

  Network() = default;
  explicit Network(Shape in) : input_shape(std::move(in)) {}

  Layer& add_dense(std::size_t out, ActivationConfig act = {});
  Layer& add_conv2d(std::size_t out_channels, int kernel, int stride, int padding, ActivationConfig act = {});
  Layer& add_maxpool2d(int window, int stride);
  Layer& add_flatten();

  /// Output shape of each layer, derived from input_shape. Throws ShapeError
  /// when consecutive layers do not compose.
  std::vector<Shape> layer_output_shapes() const;

  /// Shape a bound buffer must have for the given layer under the current
  /// granularity.
  Shape bound_shape(std::size_t layer_index) const;

  /// Total activation elements across bounded-activation sites (one per neuron).
  std::size_t neuron_count() const;

  /// Number of bound parameters; equals neuron_count() under per-neuron
  /// granularity.
  std::size_t bound_count() const;

  /// Structural and configuration checks; throws on violation.
  void validate() const;
};

/// Runs the composed network. Accepts a single sample (input_shape) or a
/// batch ((B,) + input_shape); returns logits of matching rank. The final
/// layer's activation is whatever its config says; builders leave it identity.
Tensor forward(const Network& net, const Tensor& input);

/// Argmax over single-sample logits; ties resolve to the lowest index.
std::size_t predict(const Network& net, const Tensor& input);

enum class ParamKind { weights, bias, lambda };

std::string to_string(ParamKind k);

/// One fault-injectable buffer.
struct CensusEntry {
  std::string id;  // "layer<k>/<weights|bias|lambda>"
  std::size_t layer_index = 0;
  ParamKind kind = ParamKind::weights;
  std::size_t element_count = 0;
  std::size_t bits_total = 0;
};

/// Every buffer whose stored bits are part of the fault space, in a fixed
/// deterministic order (layer order, then weights, bias, lambda).
std::vector<CensusEntry> parameter_census(const Network& net);

FixedTensor& param_buffer(Network& net, std::size_t layer_index, ParamKind kind);
const FixedTensor& param_buffer(const Network& net, std::size_t layer_index, ParamKind kind);

/// Fingerprint of all weight and bias words; the decoupled training stages
/// must leave it unchanged.
std::uint64_t weights_bias_hash(const Network& net);

/// Fingerprint of one buffer's words.
std::uint64_t buffer_hash(const FixedTensor& t);

}  // namespace fitact
