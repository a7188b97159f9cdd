#pragma once

#include <functional>
#include <string>

#include "fitact/adam.hpp"
#include "fitact/backprop.hpp"
#include "fitact/bounds.hpp"
#include "fitact/dataset.hpp"

namespace fitact {

/// One line of the per-epoch metrics stream.
struct EpochMetrics {
  int epoch = 0;
  double loss = 0.0;
  double clean_accuracy = 0.0;
  bool has_bounds = false;
  double lambda_mean = 0.0;
  double lambda_min = 0.0;
  double lambda_max = 0.0;
};

using MetricsSink = std::function<void(const EpochMetrics&)>;

std::string metrics_csv_header();
std::string metrics_csv_line(const EpochMetrics& m);

struct TrainConfig {
  int epochs = 60;
  std::size_t batch_size = 64;
  std::uint64_t seed = 1;
  AdamConfig adam;
  MetricsSink metrics;  // when set, per-epoch accuracy is computed too
};

struct PostTrainConfig {
  double zeta = 1e-3;
  int epochs = 10;
  std::size_t batch_size = 64;
  std::uint64_t seed = 1;
  AdamConfig adam;
  double delta = 0.01;  // tolerated clean-accuracy drop, as a fraction
  double val_fraction = 0.2;
  std::uint64_t split_seed = 99;
  MetricsSink metrics;
};

/// He-style random weights, zero biases; the starting point for stage one.
void init_weights(Network& net, std::uint64_t seed);

/// Stage one: minimizes cross-entropy over weights and biases with mini-batch
/// updates. Activations must be plain ReLU (or identity).
Network train_accuracy(const Network& net, const Dataset& ds, const TrainConfig& cfg);

/// Stage-two preparation: replaces every ReLU with a smooth per-neuron bounded
/// activation of slope k, bounds initialized from calibration. Weights and
/// biases are carried over bit for bit.
Network modify_architecture(const Network& net, const Dataset& ds, double k);

/// Stage two: updates only the bound values against cross-entropy plus the
/// bound-size penalty, then returns the checkpoint with the smallest bound
/// norm whose validation accuracy stays within delta of the unbounded model.
Network post_train_bounds(const Network& net, const Dataset& ds, const PostTrainConfig& cfg);

/// Fraction of samples whose predicted class matches the label.
double evaluate_accuracy(const Network& net, const Dataset& ds);

}  // namespace fitact
