#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "fitact/dataset.hpp"
#include "fitact/faultsim.hpp"
#include "fitact/network.hpp"

namespace fitact {

/// Protection configurations a campaign compares.
enum class Scheme { unprotected, gbrelu_squash, gbrelu_clamp, fitact };

std::string to_string(Scheme s);
Scheme scheme_from_string(const std::string& s);

struct ExperimentSpec {
  std::vector<double> fault_rates;
  int trials_per_rate = 100;
  std::uint64_t seed = 0;
  bool include_lambda = true;              // keep bound buffers in the fault space
  std::vector<std::size_t> scope_layers;   // restrict faults to these layers; empty = all
  int workers = 0;                         // trial fan-out; 0 picks hardware concurrency
};

/// Descriptive statistics; quartiles use linear interpolation, stddev is the
/// population form.
struct SummaryStats {
  double mean = 0, stddev = 0, min = 0, max = 0, q25 = 0, median = 0, q75 = 0;
};

SummaryStats summarize(std::vector<double> values);

struct CellStats {
  Scheme scheme = Scheme::unprotected;
  double fault_rate = 0;
  std::vector<double> accuracies;      // by trial index
  std::vector<std::uint64_t> seeds;    // per-trial fault seeds
  SummaryStats stats;
};

struct CampaignReport {
  std::vector<CellStats> cells;  // scheme-major, then rate order
  std::vector<std::pair<Scheme, double>> clean_accuracy;
  ExperimentSpec spec;
  std::string timestamp;  // informational only, excluded from determinism
};

/// Runs trials_per_rate seeded injections per (scheme, rate) cell. Trial seeds
/// depend only on (spec.seed, rate index, trial index), so schemes see paired
/// randomness. When fault_log_dir is non-empty, each trial's events are logged
/// there for replay.
CampaignReport run_campaign(const std::vector<std::pair<Scheme, const Network*>>& models, const Dataset& eval_set,
                            const ExperimentSpec& spec, const std::string& fault_log_dir = "");

/// Raw samples, columns scheme,fault_rate,trial,seed,accuracy. Byte-identical
/// across reruns of the same spec.
std::string campaign_csv(const CampaignReport& report);
std::string campaign_json(const CampaignReport& report);

struct SweepRow {
  double bound = 0;
  double clean_accuracy = 0;
  double mean_faulted_accuracy = 0;
};

/// Replaces the given layer's activation with a globally bounded ReLU at each
/// candidate bound and reports clean vs. faulted accuracy. Faults land in the
/// parameters of the swept layer and everything upstream of it.
std::vector<SweepRow> sweep_global_bound(const Network& net, std::size_t layer_index,
                                         const std::vector<double>& bound_values, double fault_rate, int trials,
                                         GBReluMode mode, std::uint64_t seed, const Dataset& eval_set);

std::string sweep_csv(const std::vector<SweepRow>& rows);

struct NeuronMaxHistogram {
  std::vector<double> maxima;  // per-neuron calibrated bounds (floored maxima)
  std::vector<double> bin_edges;
  std::vector<std::size_t> counts;
};

NeuronMaxHistogram neuron_max_histogram(const Network& net, std::size_t layer_index, const Dataset& ds,
                                        std::size_t bins = 32);

std::string histogram_csv(const NeuronMaxHistogram& h);

struct OverheadReport {
  double baseline_ns = 0;  // median single-sample forward, wall time
  double fitact_ns = 0;
  double runtime_overhead = 0;  // (fitact - baseline) / baseline
  std::size_t baseline_bytes = 0;
  std::size_t fitact_bytes = 0;
  double memory_overhead = 0;
  int repetitions = 0;
  int warmups = 0;
};

OverheadReport measure_overhead(const Network& baseline, const Network& fitact_model, const Tensor& sample_input,
                                int repetitions = 50, int warmups = 5);

std::string overhead_json(const OverheadReport& report);

}  // namespace fitact
