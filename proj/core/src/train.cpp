#include "fitact/train.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <optional>
#include <random>

#include "fitact/errors.hpp"

namespace fitact {

std::string metrics_csv_header() { return "epoch,loss,clean_accuracy,lambda_mean,lambda_min,lambda_max"; }

std::string metrics_csv_line(const EpochMetrics& m) {
  char buf[256];
  if (m.has_bounds) {
    std::snprintf(buf, sizeof(buf), "%d,%.9g,%.9g,%.9g,%.9g,%.9g", m.epoch, m.loss, m.clean_accuracy, m.lambda_mean,
                  m.lambda_min, m.lambda_max);
  } else {
    std::snprintf(buf, sizeof(buf), "%d,%.9g,%.9g,,,", m.epoch, m.loss, m.clean_accuracy);
  }
  return buf;
}

void init_weights(Network& net, std::uint64_t seed) {
  std::mt19937_64 eng(seed);
  for (Layer& l : net.layers) {
    if (l.weights.empty()) continue;
    std::size_t fan_in = 1;
    for (std::size_t d = 1; d < l.weights.shape.size(); ++d) fan_in *= l.weights.shape[d];
    std::normal_distribution<double> dist(0.0, std::sqrt(2.0 / static_cast<double>(fan_in)));
    Tensor w(l.weights.shape);
    for (std::size_t i = 0; i < w.size(); ++i) w[i] = dist(eng);
    l.weights = FixedTensor::encode(w);
    l.bias = FixedTensor::encode(Tensor(l.bias.shape));
  }
}

namespace {

double accuracy_real(const Network& topology, const RealParams& params, const Dataset& ds) {
  constexpr std::size_t kBatch = 64;
  std::size_t correct = 0;
  std::vector<std::size_t> idx;
  for (std::size_t start = 0; start < ds.size(); start += kBatch) {
    idx.clear();
    for (std::size_t i = start; i < std::min(ds.size(), start + kBatch); ++i) idx.push_back(i);
    const Tensor logits = forward_real(topology, params, stack_batch(ds, idx), nullptr, nullptr);
    const std::size_t classes = logits.shape()[1];
    for (std::size_t r = 0; r < idx.size(); ++r) {
      const double* row = logits.data().data() + r * classes;
      std::size_t best = 0;
      for (std::size_t c = 1; c < classes; ++c) {
        if (row[c] > row[best]) best = c;
      }
      if (static_cast<int>(best) == ds.labels[idx[r]]) ++correct;
    }
  }
  return static_cast<double>(correct) / static_cast<double>(ds.size());
}

std::vector<std::vector<std::size_t>> make_batches(std::size_t n, std::size_t batch_size, std::mt19937_64& eng) {
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::shuffle(idx.begin(), idx.end(), eng);
  std::vector<std::vector<std::size_t>> batches;
  for (std::size_t start = 0; start < n; start += batch_size) {
    batches.emplace_back(idx.begin() + static_cast<long>(start),
                         idx.begin() + static_cast<long>(std::min(n, start + batch_size)));
  }
  return batches;
}

std::vector<int> gather_labels(const Dataset& ds, const std::vector<std::size_t>& idx) {
  std::vector<int> y(idx.size());
  for (std::size_t i = 0; i < idx.size(); ++i) y[i] = ds.labels[idx[i]];
  return y;
}

struct LambdaStats {
  double mean = 0.0, min = 0.0, max = 0.0;
};

LambdaStats lambda_stats(const RealParams& params) {
  LambdaStats s;
  double total = 0.0;
  std::size_t n = 0;
  bool first = true;
  for (const LayerParams& p : params) {
    for (double v : p.lambda.data()) {
      total += v;
      if (first || v < s.min) s.min = v;
      if (first || v > s.max) s.max = v;
      first = false;
      ++n;
    }
  }
  if (n) s.mean = total / static_cast<double>(n);
  return s;
}

}  // namespace

Network train_accuracy(const Network& net, const Dataset& ds, const TrainConfig& cfg) {
  if (ds.empty()) throw DataError("train_accuracy: empty dataset");
  net.validate();
  for (const Layer& l : net.layers) {
    if (l.activation.kind != ActivationKind::identity && l.activation.kind != ActivationKind::relu) {
      throw ConfigError("train_accuracy expects plain ReLU activations, found " + to_string(l.activation.kind));
    }
  }
  Network out = net;
  RealParams params = decode_params(out);
  std::vector<AdamState> sw(params.size()), sb(params.size());
  for (std::size_t i = 0; i < params.size(); ++i) {
    sw[i] = AdamState(params[i].weights.size());
    sb[i] = AdamState(params[i].bias.size());
  }
  const LossSpec loss{};  // plain cross-entropy
  std::mt19937_64 eng(cfg.seed);
  std::size_t step = 0;
  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    double epoch_loss = 0.0;
    const auto batches = make_batches(ds.size(), cfg.batch_size, eng);
    for (const auto& bidx : batches) {
      RealParams grads = zero_grads(params);
      const double l =
          loss_and_grad(out, params, stack_batch(ds, bidx), gather_labels(ds, bidx), loss, grads, true, false);
      ++step;
      if (!std::isfinite(l)) {
        throw TrainingError("training diverged: non-finite loss at step " + std::to_string(step));
      }
      epoch_loss += l;
      for (std::size_t i = 0; i < params.size(); ++i) {
        if (params[i].weights.size()) adam_step(params[i].weights.data(), grads[i].weights.data(), sw[i], cfg.adam);
        if (params[i].bias.size()) adam_step(params[i].bias.data(), grads[i].bias.data(), sb[i], cfg.adam);
      }
    }
    if (cfg.metrics) {
      EpochMetrics m;
      m.epoch = epoch;
      m.loss = epoch_loss / static_cast<double>(batches.size());
      m.clean_accuracy = accuracy_real(out, params, ds);
      cfg.metrics(m);
    }
  }
  encode_params(params, out);
  return out;
}

Network modify_architecture(const Network& net, const Dataset& ds, double k) {
  if (k <= 0.0) throw ConfigError("modify_architecture: slope k must be positive");
  net.validate();
  for (const Layer& l : net.layers) {
    if (l.activation.kind != ActivationKind::identity && l.activation.kind != ActivationKind::relu) {
      throw ConfigError("modify_architecture expects a stage-one ReLU model, found " + to_string(l.activation.kind));
    }
  }
  const BoundStore store = calibrate_bounds(net, ds);
  Network out = net;
  for (const BoundStore::Entry& e : store.per_layer) {
    Layer& l = out.layers[e.layer_index];
    ActivationConfig act;
    act.kind = ActivationKind::fitrelu;
    act.slope = k;
    l.activation = act;
    l.lambda = e.bounds;
  }
  out.validate();
  return out;
}

Network post_train_bounds(const Network& net, const Dataset& ds, const PostTrainConfig& cfg) {
  net.validate();
  bool any_bounded = false;
  for (const Layer& l : net.layers) {
    if (l.activation.kind == ActivationKind::identity) continue;
    if (l.activation.kind != ActivationKind::fitrelu) {
      throw ConfigError("post_train_bounds needs trainable bounded activations; run modify/calibrate first");
    }
    any_bounded = true;
  }
  if (!any_bounded) throw ConfigError("post_train_bounds: model has no bounded activations; run modify/calibrate first");
  if (cfg.delta <= 0.0) throw ConfigError("post_train_bounds: delta must be positive");

  auto [train_part, val_part] = split_dataset(ds, cfg.val_fraction, cfg.split_seed);
  if (train_part.empty() || val_part.empty()) {
    throw DataError("post_train_bounds: validation split left an empty part");
  }

  // Clean accuracy of the unbounded model on the same words; the budget is
  // measured against this.
  const double baseline = evaluate_accuracy(relu_view(net), val_part);

  Network work = net;
  RealParams params = decode_params(work);
  std::vector<AdamState> sl(params.size());
  for (std::size_t i = 0; i < params.size(); ++i) sl[i] = AdamState(params[i].lambda.size());
  const LossSpec loss{cfg.zeta, net.bound_count()};

  struct Snapshot {
    double sumsq;
    Network model;
  };
  std::optional<Snapshot> best;

  std::mt19937_64 eng(cfg.seed);
  std::size_t step = 0;
  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    double epoch_loss = 0.0;
    const auto batches = make_batches(train_part.size(), cfg.batch_size, eng);
    for (const auto& bidx : batches) {
      RealParams grads = zero_grads(params);
      const double l = loss_and_grad(work, params, stack_batch(train_part, bidx), gather_labels(train_part, bidx),
                                     loss, grads, false, true);
      ++step;
      if (!std::isfinite(l)) {
        throw TrainingError("post-training diverged: non-finite loss at step " + std::to_string(step));
      }
      epoch_loss += l;
      for (std::size_t i = 0; i < params.size(); ++i) {
        if (!params[i].lambda.size()) continue;
        adam_step(params[i].lambda.data(), grads[i].lambda.data(), sl[i], cfg.adam);
        for (double& v : params[i].lambda.data()) v = std::max(v, kBoundFloor);
      }
      encode_lambda(params, work);
    }
    const double val_acc = evaluate_accuracy(work, val_part);
    const double sumsq = sum_lambda_sq(params);
    if (baseline - val_acc < cfg.delta) {
      if (!best || sumsq < best->sumsq) best = Snapshot{sumsq, work};
    }
    if (cfg.metrics) {
      const LambdaStats ls = lambda_stats(params);
      EpochMetrics m;
      m.epoch = epoch;
      m.loss = epoch_loss / static_cast<double>(batches.size());
      m.clean_accuracy = val_acc;
      m.has_bounds = true;
      m.lambda_mean = ls.mean;
      m.lambda_min = ls.min;
      m.lambda_max = ls.max;
      cfg.metrics(m);
    }
  }
  if (!best) {
    throw TrainingError("post_train_bounds: no epoch stayed within the accuracy budget; try a smaller zeta");
  }
  return best->model;
}

double evaluate_accuracy(const Network& net, const Dataset& ds) {
  if (ds.empty()) throw DataError("evaluate_accuracy: empty dataset");
  return accuracy_real(net, decode_params(net), ds);
}

}  // namespace fitact
