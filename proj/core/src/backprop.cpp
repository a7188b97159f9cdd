#include "fitact/backprop.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "fitact/errors.hpp"

namespace fitact {

RealParams decode_params(const Network& net) {
  RealParams out;
  out.reserve(net.layers.size());
  for (const Layer& l : net.layers) {
    LayerParams p;
    if (!l.weights.empty()) p.weights = l.weights.decode();
    if (!l.bias.empty()) p.bias = l.bias.decode();
    if (!l.lambda.empty()) p.lambda = l.lambda.decode();
    out.push_back(std::move(p));
  }
  return out;
}

void encode_params(const RealParams& params, Network& net) {
  for (std::size_t i = 0; i < net.layers.size(); ++i) {
    if (params[i].weights.size()) net.layers[i].weights = FixedTensor::encode(params[i].weights);
    if (params[i].bias.size()) net.layers[i].bias = FixedTensor::encode(params[i].bias);
    if (params[i].lambda.size()) net.layers[i].lambda = FixedTensor::encode(params[i].lambda);
  }
}

void encode_lambda(const RealParams& params, Network& net) {
  for (std::size_t i = 0; i < net.layers.size(); ++i) {
    if (params[i].lambda.size()) net.layers[i].lambda = FixedTensor::encode(params[i].lambda);
  }
}

double sum_lambda_sq(const RealParams& params) {
  double s = 0.0;
  for (const LayerParams& p : params) {
    for (double v : p.lambda.data()) s += v * v;
  }
  return s;
}

RealParams zero_grads(const RealParams& params) {
  RealParams g;
  g.reserve(params.size());
  for (const LayerParams& p : params) {
    LayerParams z;
    z.weights = zeros_like(p.weights);
    z.bias = zeros_like(p.bias);
    z.lambda = zeros_like(p.lambda);
    g.push_back(std::move(z));
  }
  return g;
}

namespace {

std::size_t channel_extent(const Shape& sample) {
  // flat index -> channel divisor for per-channel bound lookup
  return sample.size() == 3 ? sample[1] * sample[2] : 1;
}

void apply_activation(const Layer& layer, const LayerParams& p, BoundGranularity gran, Tensor& z_batch,
                      const Tensor* z_pre_kept) {
  (void)z_pre_kept;
  const ActivationKind kind = layer.activation.kind;
  if (kind == ActivationKind::identity) return;
  const std::size_t batch = z_batch.shape()[0];
  const std::size_t sample = z_batch.size() / batch;
  const Shape sample_shape(z_batch.shape().begin() + 1, z_batch.shape().end());
  double* v = z_batch.data().data();
  switch (kind) {
    case ActivationKind::relu:
      for (std::size_t i = 0; i < z_batch.size(); ++i) v[i] = detail::relu(v[i]);
      return;
    case ActivationKind::gbrelu: {
      const double bound = layer.activation.global_bound;
      const GBReluMode mode = layer.activation.mode;
      for (std::size_t i = 0; i < z_batch.size(); ++i) v[i] = detail::gbrelu(v[i], bound, mode);
      return;
    }
    case ActivationKind::fitrelu_naive:
    case ActivationKind::fitrelu: {
      const double k = layer.activation.slope;
      const std::vector<double>& lam = p.lambda.data();
      const std::size_t chan_div =
          gran == BoundGranularity::per_channel ? channel_extent(sample_shape) : 1;
      for (std::size_t b = 0; b < batch; ++b) {
        double* row = v + b * sample;
        for (std::size_t i = 0; i < sample; ++i) {
          const double bound = lam[i / chan_div];
          row[i] = kind == ActivationKind::fitrelu ? detail::fitrelu(row[i], bound, k)
                                                   : detail::fitrelu_naive(row[i], bound);
        }
      }
      return;
    }
    default:
      return;
  }
}

Tensor dense_forward(const Tensor& x, const LayerParams& p) {
  const std::size_t batch = x.shape()[0];
  const std::size_t in = x.shape()[1];
  const std::size_t out = p.weights.shape()[0];
  Tensor y({batch, out});
  const double* w = p.weights.data().data();
  const double* bs = p.bias.data().data();
  for (std::size_t b = 0; b < batch; ++b) {
    const double* xr = x.data().data() + b * in;
    double* yr = y.data().data() + b * out;
    for (std::size_t o = 0; o < out; ++o) {
      double acc = bs[o];
      const double* wr = w + o * in;
      for (std::size_t i = 0; i < in; ++i) acc += wr[i] * xr[i];
      yr[o] = acc;
    }
  }
  return y;
}

Tensor conv_forward(const Tensor& x, const Layer& layer, const LayerParams& p) {
  Tensor y = conv2d(x, p.weights, layer.stride, layer.padding);
  const std::size_t batch = y.shape()[0];
  const std::size_t oc = y.shape()[1];
  const std::size_t plane = y.shape()[2] * y.shape()[3];
  const double* bs = p.bias.data().data();
  double* v = y.data().data();
  for (std::size_t b = 0; b < batch; ++b) {
    for (std::size_t c = 0; c < oc; ++c) {
      double* row = v + (b * oc + c) * plane;
      for (std::size_t i = 0; i < plane; ++i) row[i] += bs[c];
    }
  }
  return y;
}

Tensor pool_forward(const Tensor& x, const Layer& layer, std::vector<std::size_t>* argmax) {
  const std::size_t batch = x.shape()[0], c = x.shape()[1], h = x.shape()[2], w = x.shape()[3];
  const int window = layer.window, stride = layer.stride;
  const std::size_t oh = (h - window) / stride + 1;
  const std::size_t ow = (w - window) / stride + 1;
  Tensor y({batch, c, oh, ow});
  if (argmax) argmax->assign(y.size(), 0);
  const double* xv = x.data().data();
  double* yv = y.data().data();
  std::size_t oi = 0;
  for (std::size_t b = 0; b < batch; ++b) {
    for (std::size_t ch = 0; ch < c; ++ch) {
      const double* plane = xv + (b * c + ch) * h * w;
      for (std::size_t oy = 0; oy < oh; ++oy) {
        for (std::size_t ox = 0; ox < ow; ++ox, ++oi) {
          double best = -std::numeric_limits<double>::infinity();
          std::size_t best_idx = 0;
          for (int ky = 0; ky < window; ++ky) {
            for (int kx = 0; kx < window; ++kx) {
              const std::size_t idx = (oy * stride + ky) * w + (ox * stride + kx);
              if (plane[idx] > best) {
                best = plane[idx];
                best_idx = idx;
              }
            }
          }
          yv[oi] = best;
          if (argmax) (*argmax)[oi] = (b * c + ch) * h * w + best_idx;
        }
      }
    }
  }
  return y;
}

}  // namespace

Tensor forward_real(const Network& topology, const RealParams& params, const Tensor& batch,
                    const ActivationObserver* observer, BatchCache* cache) {
  if (batch.ndim() != topology.input_shape.size() + 1 ||
      Shape(batch.shape().begin() + 1, batch.shape().end()) != topology.input_shape) {
    throw ShapeError("forward: batch " + shape_to_string(batch.shape()) + " does not match network input " +
                     shape_to_string(topology.input_shape));
  }
  if (cache) {
    cache->inputs.assign(topology.layers.size(), Tensor());
    cache->preacts.assign(topology.layers.size(), Tensor());
    cache->pool_argmax.assign(topology.layers.size(), {});
  }
  Tensor x = batch;
  for (std::size_t i = 0; i < topology.layers.size(); ++i) {
    const Layer& layer = topology.layers[i];
    const LayerParams& p = params[i];
    if (cache) cache->inputs[i] = x;
    Tensor z;
    switch (layer.kind) {
      case LayerKind::dense:
        z = dense_forward(x, p);
        break;
      case LayerKind::conv2d:
        z = conv_forward(x, layer, p);
        break;
      case LayerKind::maxpool2d:
        z = pool_forward(x, layer, cache ? &cache->pool_argmax[i] : nullptr);
        break;
      case LayerKind::flatten: {
        Shape s{x.shape()[0], x.size() / x.shape()[0]};
        z = x.reshaped(s);
        break;
      }
    }
    if (cache) cache->preacts[i] = z;
    apply_activation(layer, p, topology.granularity, z, nullptr);
    if (observer && layer.activation.kind != ActivationKind::identity) (*observer)(i, z);
    x = std::move(z);
  }
  return x;
}

double cross_entropy(const Tensor& logits, const std::vector<int>& labels) {
  const std::size_t batch = logits.shape()[0];
  const std::size_t classes = logits.shape()[1];
  double total = 0.0;
  for (std::size_t b = 0; b < batch; ++b) {
    const double* row = logits.data().data() + b * classes;
    double m = row[0];
    for (std::size_t c = 1; c < classes; ++c) m = std::max(m, row[c]);
    double lse = 0.0;
    for (std::size_t c = 0; c < classes; ++c) lse += std::exp(row[c] - m);
    lse = m + std::log(lse);
    total += lse - row[static_cast<std::size_t>(labels[b])];
  }
  return total / static_cast<double>(batch);
}

double batch_loss(const Network& topology, const RealParams& params, const Tensor& batch_x,
                  const std::vector<int>& batch_y, const LossSpec& loss) {
  const Tensor logits = forward_real(topology, params, batch_x, nullptr, nullptr);
  return cross_entropy(logits, batch_y) + loss.penalty(sum_lambda_sq(params));
}

namespace {

// Gradient of the activation site: scales the incoming gradient by d(act)/dz
// in place and accumulates bound gradients when asked.
void activation_backward(const Layer& layer, const LayerParams& p, BoundGranularity gran, const Tensor& preact,
                         Tensor& g, Tensor* lambda_grad) {
  const ActivationKind kind = layer.activation.kind;
  if (kind == ActivationKind::identity) return;
  const std::size_t batch = g.shape()[0];
  const std::size_t sample = g.size() / batch;
  const Shape sample_shape(g.shape().begin() + 1, g.shape().end());
  const double* z = preact.data().data();
  double* gv = g.data().data();
  if (kind == ActivationKind::relu) {
    for (std::size_t i = 0; i < g.size(); ++i) gv[i] = z[i] > 0.0 ? gv[i] : 0.0;
    return;
  }
  if (kind != ActivationKind::fitrelu) {
    throw TrainingError("activation " + to_string(kind) + " is not differentiable; training supports relu and fitrelu");
  }
  const double k = layer.activation.slope;
  const std::vector<double>& lam = p.lambda.data();
  const std::size_t chan_div = gran == BoundGranularity::per_channel ? channel_extent(sample_shape) : 1;
  double* lg = lambda_grad && lambda_grad->size() ? lambda_grad->data().data() : nullptr;
  for (std::size_t b = 0; b < batch; ++b) {
    const double* zr = z + b * sample;
    double* gr = gv + b * sample;
    for (std::size_t i = 0; i < sample; ++i) {
      const std::size_t li = i / chan_div;
      const double bound = lam[li];
      if (lg) lg[li] += gr[i] * detail::fitrelu_grad_lambda(zr[i], bound, k);
      gr[i] *= detail::fitrelu_grad_x(zr[i], bound, k);
    }
  }
}

void dense_backward(const Tensor& x, const LayerParams& p, const Tensor& g, Tensor* gw, Tensor* gb, Tensor& gx_out) {
  const std::size_t batch = x.shape()[0];
  const std::size_t in = x.shape()[1];
  const std::size_t out = g.shape()[1];
  gx_out = Tensor({batch, in});
  const double* w = p.weights.data().data();
  for (std::size_t b = 0; b < batch; ++b) {
    const double* xr = x.data().data() + b * in;
    const double* gr = g.data().data() + b * out;
    double* gxr = gx_out.data().data() + b * in;
    for (std::size_t o = 0; o < out; ++o) {
      const double gv = gr[o];
      if (gw) {
        double* gwr = gw->data().data() + o * in;
        for (std::size_t i = 0; i < in; ++i) gwr[i] += gv * xr[i];
      }
      if (gb) (*gb)[o] += gv;
      const double* wr = w + o * in;
      for (std::size_t i = 0; i < in; ++i) gxr[i] += wr[i] * gv;
    }
  }
}

void conv_backward(const Tensor& x, const Layer& layer, const LayerParams& p, const Tensor& g, Tensor* gw, Tensor* gb,
                   Tensor& gx_out) {
  const std::size_t batch = x.shape()[0], cin = x.shape()[1], h = x.shape()[2], w = x.shape()[3];
  const std::size_t cout = g.shape()[1], oh = g.shape()[2], ow = g.shape()[3];
  const std::size_t kh = p.weights.shape()[2], kw = p.weights.shape()[3];
  const int stride = layer.stride, pad = layer.padding;
  gx_out = Tensor({batch, cin, h, w});
  const double* kv = p.weights.data().data();
  for (std::size_t b = 0; b < batch; ++b) {
    for (std::size_t oc = 0; oc < cout; ++oc) {
      const double* gplane = g.data().data() + (b * cout + oc) * oh * ow;
      for (std::size_t oy = 0; oy < oh; ++oy) {
        for (std::size_t ox = 0; ox < ow; ++ox) {
          const double gv = gplane[oy * ow + ox];
          if (gv == 0.0) continue;
          if (gb) (*gb)[oc] += gv;
          for (std::size_t ic = 0; ic < cin; ++ic) {
            const double* xplane = x.data().data() + (b * cin + ic) * h * w;
            double* gxplane = gx_out.data().data() + (b * cin + ic) * h * w;
            for (std::size_t ky = 0; ky < kh; ++ky) {
              const long iy = static_cast<long>(oy) * stride + static_cast<long>(ky) - pad;
              if (iy < 0 || iy >= static_cast<long>(h)) continue;
              for (std::size_t kx = 0; kx < kw; ++kx) {
                const long ix = static_cast<long>(ox) * stride + static_cast<long>(kx) - pad;
                if (ix < 0 || ix >= static_cast<long>(w)) continue;
                const std::size_t widx = ((oc * cin + ic) * kh + ky) * kw + kx;
                if (gw) gw->data()[widx] += gv * xplane[iy * w + ix];
                gxplane[iy * w + ix] += gv * kv[widx];
              }
            }
          }
        }
      }
    }
  }
}

}  // namespace

double loss_and_grad(const Network& topology, const RealParams& params, const Tensor& batch_x,
                     const std::vector<int>& batch_y, const LossSpec& loss, RealParams& grads,
                     bool want_param_grads, bool want_lambda_grads) {
  BatchCache cache;
  const Tensor logits = forward_real(topology, params, batch_x, nullptr, &cache);
  const std::size_t batch = logits.shape()[0];
  const std::size_t classes = logits.shape()[1];
  const double ce = cross_entropy(logits, batch_y);

  // d(mean CE)/d(logits) = (softmax - onehot) / B
  Tensor g({batch, classes});
  for (std::size_t b = 0; b < batch; ++b) {
    const double* row = logits.data().data() + b * classes;
    double* gr = g.data().data() + b * classes;
    double m = row[0];
    for (std::size_t c = 1; c < classes; ++c) m = std::max(m, row[c]);
    double denom = 0.0;
    for (std::size_t c = 0; c < classes; ++c) denom += std::exp(row[c] - m);
    for (std::size_t c = 0; c < classes; ++c) gr[c] = std::exp(row[c] - m) / denom;
    gr[static_cast<std::size_t>(batch_y[b])] -= 1.0;
    for (std::size_t c = 0; c < classes; ++c) gr[c] /= static_cast<double>(batch);
  }

  for (std::size_t li = topology.layers.size(); li-- > 0;) {
    const Layer& layer = topology.layers[li];
    const LayerParams& p = params[li];
    const Tensor& x = cache.inputs[li];
    activation_backward(layer, p, topology.granularity, cache.preacts[li], g,
                        want_lambda_grads ? &grads[li].lambda : nullptr);
    Tensor gx;
    switch (layer.kind) {
      case LayerKind::dense:
        dense_backward(x, p, g, want_param_grads ? &grads[li].weights : nullptr,
                       want_param_grads ? &grads[li].bias : nullptr, gx);
        break;
      case LayerKind::conv2d:
        conv_backward(x, layer, p, g, want_param_grads ? &grads[li].weights : nullptr,
                      want_param_grads ? &grads[li].bias : nullptr, gx);
        break;
      case LayerKind::maxpool2d: {
        gx = zeros_like(x);
        const std::vector<std::size_t>& arg = cache.pool_argmax[li];
        for (std::size_t i = 0; i < g.size(); ++i) gx.data()[arg[i]] += g[i];
        break;
      }
      case LayerKind::flatten:
        gx = g.reshaped(x.shape());
        break;
    }
    g = std::move(gx);
  }

  if (want_lambda_grads && loss.bound_count > 0) {
    const double scale = 2.0 * loss.zeta / static_cast<double>(loss.bound_count);
    for (std::size_t li = 0; li < params.size(); ++li) {
      const std::vector<double>& lam = params[li].lambda.data();
      std::vector<double>& lg = grads[li].lambda.data();
      for (std::size_t i = 0; i < lam.size(); ++i) lg[i] += scale * lam[i];
    }
  }
  return ce + loss.penalty(sum_lambda_sq(params));
}

}  // namespace fitact
