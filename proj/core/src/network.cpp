#include "fitact/network.hpp"

#include "fitact/backprop.hpp"
#include "fitact/hash.hpp"

namespace fitact {

std::string to_string(LayerKind k) {
  switch (k) {
    case LayerKind::dense: return "dense";
    case LayerKind::conv2d: return "conv2d";
    case LayerKind::maxpool2d: return "maxpool2d";
    case LayerKind::flatten: return "flatten";
  }
  return "?";
}

std::string to_string(ParamKind k) {
  switch (k) {
    case ParamKind::weights: return "weights";
    case ParamKind::bias: return "bias";
    case ParamKind::lambda: return "lambda";
  }
  return "?";
}

Layer& Network::add_dense(std::size_t out, ActivationConfig act) {
  const std::vector<Shape> shapes = layer_output_shapes();
  const Shape& in = shapes.empty() ? input_shape : shapes.back();
  if (in.size() != 1) {
    throw ShapeError("dense layer needs a flat input, got " + shape_to_string(in) + "; add a flatten layer first");
  }
  Layer l;
  l.kind = LayerKind::dense;
  l.activation = act;
  l.weights = FixedTensor{{out, in[0]}, std::vector<FixedPoint32>(out * in[0])};
  l.bias = FixedTensor{{out}, std::vector<FixedPoint32>(out)};
  layers.push_back(std::move(l));
  return layers.back();
}

Layer& Network::add_conv2d(std::size_t out_channels, int kernel, int stride, int padding, ActivationConfig act) {
  const std::vector<Shape> shapes = layer_output_shapes();
  const Shape& in = shapes.empty() ? input_shape : shapes.back();
  if (in.size() != 3) {
    throw ShapeError("conv2d layer needs a (C,H,W) input, got " + shape_to_string(in));
  }
  Layer l;
  l.kind = LayerKind::conv2d;
  l.activation = act;
  l.stride = stride;
  l.padding = padding;
  const std::size_t k = static_cast<std::size_t>(kernel);
  l.weights = FixedTensor{{out_channels, in[0], k, k}, std::vector<FixedPoint32>(out_channels * in[0] * k * k)};
  l.bias = FixedTensor{{out_channels}, std::vector<FixedPoint32>(out_channels)};
  layers.push_back(std::move(l));
  return layers.back();
}

Layer& Network::add_maxpool2d(int window, int stride) {
  Layer l;
  l.kind = LayerKind::maxpool2d;
  l.window = window;
  l.stride = stride;
  layers.push_back(std::move(l));
  return layers.back();
}

Layer& Network::add_flatten() {
  Layer l;
  l.kind = LayerKind::flatten;
  layers.push_back(std::move(l));
  return layers.back();
}

namespace {

Shape output_shape_of(const Layer& l, const Shape& in, std::size_t index) {
  const std::string where = "layer " + std::to_string(index) + " (" + to_string(l.kind) + ")";
  switch (l.kind) {
    case LayerKind::dense: {
      if (in.size() != 1 || l.weights.shape.size() != 2 || l.weights.shape[1] != in[0]) {
        throw ShapeError(where + ": weights " + shape_to_string(l.weights.shape) + " do not accept input " +
                         shape_to_string(in));
      }
      if (l.bias.shape != Shape{l.weights.shape[0]}) {
        throw ShapeError(where + ": bias " + shape_to_string(l.bias.shape) + " does not match weights " +
                         shape_to_string(l.weights.shape));
      }
      return {l.weights.shape[0]};
    }
    case LayerKind::conv2d: {
      if (in.size() != 3 || l.weights.shape.size() != 4 || l.weights.shape[1] != in[0]) {
        throw ShapeError(where + ": kernels " + shape_to_string(l.weights.shape) + " do not accept input " +
                         shape_to_string(in));
      }
      if (l.bias.shape != Shape{l.weights.shape[0]}) {
        throw ShapeError(where + ": bias " + shape_to_string(l.bias.shape) + " does not match kernels " +
                         shape_to_string(l.weights.shape));
      }
      const long oh = (static_cast<long>(in[1]) + 2 * l.padding - static_cast<long>(l.weights.shape[2])) / l.stride + 1;
      const long ow = (static_cast<long>(in[2]) + 2 * l.padding - static_cast<long>(l.weights.shape[3])) / l.stride + 1;
      if (oh <= 0 || ow <= 0) {
        throw ShapeError(where + ": empty output for input " + shape_to_string(in));
      }
      return {l.weights.shape[0], static_cast<std::size_t>(oh), static_cast<std::size_t>(ow)};
    }
    case LayerKind::maxpool2d: {
      if (in.size() != 3) throw ShapeError(where + ": needs (C,H,W) input, got " + shape_to_string(in));
      const long oh = (static_cast<long>(in[1]) - l.window) / l.stride + 1;
      const long ow = (static_cast<long>(in[2]) - l.window) / l.stride + 1;
      if (oh <= 0 || ow <= 0) throw ShapeError(where + ": window larger than input " + shape_to_string(in));
      return {in[0], static_cast<std::size_t>(oh), static_cast<std::size_t>(ow)};
    }
    case LayerKind::flatten:
      return {shape_size(in)};
  }
  throw ConfigError(where + ": unknown layer kind");
}

}  // namespace

std::vector<Shape> Network::layer_output_shapes() const {
  std::vector<Shape> out;
  out.reserve(layers.size());
  Shape cur = input_shape;
  for (std::size_t i = 0; i < layers.size(); ++i) {
    cur = output_shape_of(layers[i], cur, i);
    out.push_back(cur);
  }
  return out;
}

Shape Network::bound_shape(std::size_t layer_index) const {
  const std::vector<Shape> shapes = layer_output_shapes();
  const Shape& s = shapes.at(layer_index);
  if (granularity == BoundGranularity::per_neuron) return s;
  return {s[0]};  // channel count; equals element count for flat outputs
}

std::size_t Network::neuron_count() const {
  const std::vector<Shape> shapes = layer_output_shapes();
  std::size_t n = 0;
  for (std::size_t i = 0; i < layers.size(); ++i) {
    if (layers[i].activation.kind != ActivationKind::identity) n += shape_size(shapes[i]);
  }
  return n;
}

std::size_t Network::bound_count() const {
  const std::vector<Shape> shapes = layer_output_shapes();
  std::size_t n = 0;
  for (std::size_t i = 0; i < layers.size(); ++i) {
    if (layers[i].activation.kind != ActivationKind::identity) {
      n += granularity == BoundGranularity::per_neuron ? shape_size(shapes[i]) : shapes[i][0];
    }
  }
  return n;
}

void Network::validate() const {
  if (input_shape.empty()) throw ConfigError("network has no input shape");
  const std::vector<Shape> shapes = layer_output_shapes();  // throws on bad composition
  for (std::size_t i = 0; i < layers.size(); ++i) {
    const Layer& l = layers[i];
    l.activation.validate();
    const std::string where = "layer " + std::to_string(i);
    if ((l.kind == LayerKind::maxpool2d || l.kind == LayerKind::flatten) &&
        l.activation.kind != ActivationKind::identity) {
      throw ConfigError(where + ": pooling/flatten layers must use the identity activation");
    }
    if (l.activation.per_neuron_bounded()) {
      const Shape want = bound_shape(i);
      if (l.lambda.shape != want) {
        throw ConfigError(where + ": bound buffer shape " + shape_to_string(l.lambda.shape) + " does not match " +
                          shape_to_string(want));
      }
    } else if (!l.lambda.empty()) {
      throw ConfigError(where + ": bound buffer present but activation is " + to_string(l.activation.kind));
    }
  }
}

Tensor forward(const Network& net, const Tensor& input) {
  bool batched = false;
  if (input.shape() == net.input_shape) {
    batched = false;
  } else if (input.ndim() == net.input_shape.size() + 1 &&
             Shape(input.shape().begin() + 1, input.shape().end()) == net.input_shape) {
    batched = true;
  } else {
    throw ShapeError("forward: input " + shape_to_string(input.shape()) + " does not match network input " +
                     shape_to_string(net.input_shape));
  }
  Tensor batch = input;
  if (!batched) {
    Shape s = net.input_shape;
    s.insert(s.begin(), 1);
    batch = input.reshaped(s);
  }
  RealParams params = decode_params(net);
  Tensor logits = forward_real(net, params, batch, nullptr, nullptr);
  if (batched) return logits;
  Shape out(logits.shape().begin() + 1, logits.shape().end());
  return logits.reshaped(out);
}

std::size_t predict(const Network& net, const Tensor& input) {
  if (input.shape() != net.input_shape) {
    throw ShapeError("predict: input " + shape_to_string(input.shape()) + " does not match network input " +
                     shape_to_string(net.input_shape));
  }
  const Tensor logits = forward(net, input);
  std::size_t best = 0;
  for (std::size_t i = 1; i < logits.size(); ++i) {
    if (logits[i] > logits[best]) best = i;
  }
  return best;
}

std::vector<CensusEntry> parameter_census(const Network& net) {
  std::vector<CensusEntry> out;
  for (std::size_t i = 0; i < net.layers.size(); ++i) {
    const Layer& l = net.layers[i];
    auto push = [&](ParamKind kind, const FixedTensor& t) {
      if (t.empty()) return;
      CensusEntry e;
      e.id = "layer" + std::to_string(i) + "/" + to_string(kind);
      e.layer_index = i;
      e.kind = kind;
      e.element_count = t.size();
      e.bits_total = t.size() * 32;
      out.push_back(std::move(e));
    };
    push(ParamKind::weights, l.weights);
    push(ParamKind::bias, l.bias);
    push(ParamKind::lambda, l.lambda);
  }
  return out;
}

FixedTensor& param_buffer(Network& net, std::size_t layer_index, ParamKind kind) {
  Layer& l = net.layers.at(layer_index);
  switch (kind) {
    case ParamKind::weights: return l.weights;
    case ParamKind::bias: return l.bias;
    case ParamKind::lambda: return l.lambda;
  }
  throw ConfigError("unknown parameter kind");
}

const FixedTensor& param_buffer(const Network& net, std::size_t layer_index, ParamKind kind) {
  return param_buffer(const_cast<Network&>(net), layer_index, kind);
}

std::uint64_t buffer_hash(const FixedTensor& t) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const FixedPoint32& w : t.words) {
    h = fnv1a64(&w.raw_bits, sizeof(w.raw_bits), h);
  }
  return h;
}

std::uint64_t weights_bias_hash(const Network& net) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const Layer& l : net.layers) {
    for (const FixedPoint32& w : l.weights.words) h = fnv1a64(&w.raw_bits, sizeof(w.raw_bits), h);
    for (const FixedPoint32& w : l.bias.words) h = fnv1a64(&w.raw_bits, sizeof(w.raw_bits), h);
  }
  return h;
}

}  // namespace fitact
