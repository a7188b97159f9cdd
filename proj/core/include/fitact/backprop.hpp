#pragma once

#include <functional>
#include <vector>

#include "fitact/network.hpp"

namespace fitact {

/// Decoded double-precision view of one layer's stored parameters.
struct LayerParams {
  Tensor weights, bias, lambda;
};

using RealParams = std::vector<LayerParams>;

RealParams decode_params(const Network& net);
void encode_params(const RealParams& params, Network& net);
void encode_lambda(const RealParams& params, Network& net);
double sum_lambda_sq(const RealParams& params);

/// Called after each non-identity activation with the activated batch output.
using ActivationObserver = std::function<void(std::size_t layer_index, const Tensor& activated)>;

/// Intermediate values one backward pass needs.
struct BatchCache {
  std::vector<Tensor> inputs;                         // per-layer batched input
  std::vector<Tensor> preacts;                        // affine output before activation
  std::vector<std::vector<std::size_t>> pool_argmax;  // winning flat input index per pooled element
};

/// The one forward implementation. `batch` is ((B,) + input_shape).
Tensor forward_real(const Network& topology, const RealParams& params, const Tensor& batch,
                    const ActivationObserver* observer, BatchCache* cache);

/// Post-training objective: mean cross-entropy plus (zeta/N) * sum(lambda_i^2).
struct LossSpec {
  double zeta = 0.0;
  std::size_t bound_count = 0;

  double penalty(double lambda_sq_sum) const {
    return bound_count == 0 ? 0.0 : (zeta / static_cast<double>(bound_count)) * lambda_sq_sum;
  }
};

/// Mean cross-entropy of logits (B,C) against integer labels.
double cross_entropy(const Tensor& logits, const std::vector<int>& labels);

/// Loss for one batch under the spec, no gradients. Used as the
/// finite-difference oracle path in tests.
double batch_loss(const Network& topology, const RealParams& params, const Tensor& batch_x,
                  const std::vector<int>& batch_y, const LossSpec& loss);

/// Loss plus reverse-mode gradients, layer-local vector-Jacobian products all
/// the way down. Gradient groups are computed only when requested; `grads`
/// must be shaped like `params` (zeros_like) on entry.
double loss_and_grad(const Network& topology, const RealParams& params, const Tensor& batch_x,
                     const std::vector<int>& batch_y, const LossSpec& loss, RealParams& grads,
                     bool want_param_grads, bool want_lambda_grads);

RealParams zero_grads(const RealParams& params);

}  // namespace fitact
