#include "fitact/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "fitact/bounds.hpp"
#include "fitact/errors.hpp"
#include "fitact/model_io.hpp"
#include "fitact/rng.hpp"
#include "fitact/train.hpp"

namespace fitact {

namespace {

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string now_string() {
  const std::time_t t = std::time(nullptr);
  char buf[64];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%S", std::gmtime(&t));
  return buf;
}

}  // namespace

std::string to_string(Scheme s) {
  switch (s) {
    case Scheme::unprotected: return "unprotected";
    case Scheme::gbrelu_squash: return "gbrelu_squash";
    case Scheme::gbrelu_clamp: return "gbrelu_clamp";
    case Scheme::fitact: return "fitact";
  }
  return "?";
}

Scheme scheme_from_string(const std::string& s) {
  if (s == "unprotected") return Scheme::unprotected;
  if (s == "gbrelu_squash") return Scheme::gbrelu_squash;
  if (s == "gbrelu_clamp") return Scheme::gbrelu_clamp;
  if (s == "fitact") return Scheme::fitact;
  throw ConfigError("unknown scheme '" + s + "'");
}

SummaryStats summarize(std::vector<double> values) {
  if (values.empty()) throw DataError("summarize: no values");
  SummaryStats s;
  double total = 0.0;
  for (double v : values) total += v;
  s.mean = total / static_cast<double>(values.size());
  double var = 0.0;
  for (double v : values) var += (v - s.mean) * (v - s.mean);
  s.stddev = std::sqrt(var / static_cast<double>(values.size()));
  std::sort(values.begin(), values.end());
  s.min = values.front();
  s.max = values.back();
  const auto quantile = [&values](double p) {
    const double h = p * static_cast<double>(values.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(std::floor(h));
    const std::size_t hi = static_cast<std::size_t>(std::ceil(h));
    return values[lo] + (h - static_cast<double>(lo)) * (values[hi] - values[lo]);
  };
  s.q25 = quantile(0.25);
  s.median = quantile(0.5);
  s.q75 = quantile(0.75);
  return s;
}

namespace {

std::vector<std::string> census_scope(const Network& net, const ExperimentSpec& spec) {
  std::vector<std::string> ids;
  for (const CensusEntry& e : parameter_census(net)) {
    if (!spec.include_lambda && e.kind == ParamKind::lambda) continue;
    if (!spec.scope_layers.empty() &&
        std::find(spec.scope_layers.begin(), spec.scope_layers.end(), e.layer_index) == spec.scope_layers.end()) {
      continue;
    }
    ids.push_back(e.id);
  }
  return ids;
}

void run_jobs_parallel(std::size_t job_count, int workers, const std::function<void(std::size_t)>& job) {
  unsigned n = workers > 0 ? static_cast<unsigned>(workers) : std::thread::hardware_concurrency();
  if (n == 0) n = 1;
  n = std::min<unsigned>(n, static_cast<unsigned>(job_count ? job_count : 1));
  if (n <= 1) {
    for (std::size_t i = 0; i < job_count; ++i) job(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < n; ++t) {
    pool.emplace_back([&]() {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= job_count) return;
        try {
          job(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!error) error = std::current_exception();
          return;
        }
      }
    });
  }
  for (std::thread& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace

CampaignReport run_campaign(const std::vector<std::pair<Scheme, const Network*>>& models, const Dataset& eval_set,
                            const ExperimentSpec& spec, const std::string& fault_log_dir) {
  if (models.empty()) throw ConfigError("run_campaign: no models");
  if (spec.fault_rates.empty()) throw ConfigError("run_campaign: no fault rates");
  for (double r : spec.fault_rates) {
    if (r < 0.0 || r > 1.0) throw ConfigError("run_campaign: fault rate " + fmt_double(r) + " outside [0,1]");
  }
  if (spec.trials_per_rate < 1) throw ConfigError("run_campaign: trials_per_rate must be >= 1");
  if (eval_set.empty()) throw DataError("run_campaign: empty evaluation set");
  for (const auto& [scheme, net] : models) {
    if (net == nullptr) throw ConfigError("run_campaign: missing model for scheme " + to_string(scheme));
    net->validate();
  }
  if (!fault_log_dir.empty()) std::filesystem::create_directories(fault_log_dir);

  CampaignReport report;
  report.spec = spec;
  report.timestamp = now_string();

  const std::size_t rates = spec.fault_rates.size();
  const std::size_t trials = static_cast<std::size_t>(spec.trials_per_rate);

  for (const auto& [scheme, net] : models) {
    report.clean_accuracy.emplace_back(scheme, evaluate_accuracy(*net, eval_set));
    const std::vector<std::string> scope = census_scope(*net, spec);
    const std::vector<CensusEntry> census = parameter_census(*net);

    std::vector<std::vector<double>> acc(rates, std::vector<double>(trials, 0.0));
    std::vector<std::vector<std::uint64_t>> seeds(rates, std::vector<std::uint64_t>(trials, 0));
    run_jobs_parallel(rates * trials, spec.workers, [&](std::size_t flat) {
      const std::size_t rate_i = flat / trials;
      const std::size_t trial_i = flat % trials;
      const std::uint64_t trial_seed = derive_seed(spec.seed, {rate_i, trial_i});
      FaultModel fm;
      fm.fault_rate = spec.fault_rates[rate_i];
      fm.scope = scope;
      fm.seed = trial_seed;
      const FaultTrial trial = sample_faults(fm, census);
      if (!fault_log_dir.empty()) {
        char name[96];
        std::snprintf(name, sizeof(name), "%s_r%zu_t%zu.log", to_string(scheme).c_str(), rate_i, trial_i);
        write_fault_log(trial, (std::filesystem::path(fault_log_dir) / name).string());
      }
      acc[rate_i][trial_i] = run_trial(*net, trial, eval_set);
      seeds[rate_i][trial_i] = trial_seed;
    });

    for (std::size_t rate_i = 0; rate_i < rates; ++rate_i) {
      CellStats cell;
      cell.scheme = scheme;
      cell.fault_rate = spec.fault_rates[rate_i];
      cell.accuracies = std::move(acc[rate_i]);
      cell.seeds = std::move(seeds[rate_i]);
      cell.stats = summarize(cell.accuracies);
      report.cells.push_back(std::move(cell));
    }
  }
  return report;
}

std::string campaign_csv(const CampaignReport& report) {
  std::ostringstream out;
  out << "scheme,fault_rate,trial,seed,accuracy\n";
  for (const CellStats& cell : report.cells) {
    for (std::size_t t = 0; t < cell.accuracies.size(); ++t) {
      out << to_string(cell.scheme) << "," << fmt_double(cell.fault_rate) << "," << t << "," << cell.seeds[t] << ","
          << fmt_double(cell.accuracies[t]) << "\n";
    }
  }
  return out.str();
}

std::string campaign_json(const CampaignReport& report) {
  nlohmann::json j;
  j["timestamp"] = report.timestamp;
  j["spec"] = {
      {"fault_rates", report.spec.fault_rates}, {"trials_per_rate", report.spec.trials_per_rate},
      {"seed", report.spec.seed},               {"include_lambda", report.spec.include_lambda},
      {"scope_layers", report.spec.scope_layers}, {"workers", report.spec.workers},
  };
  nlohmann::json clean = nlohmann::json::object();
  for (const auto& [scheme, acc] : report.clean_accuracy) clean[to_string(scheme)] = acc;
  j["clean_accuracy"] = clean;
  nlohmann::json cells = nlohmann::json::array();
  for (const CellStats& c : report.cells) {
    cells.push_back({
        {"scheme", to_string(c.scheme)},
        {"fault_rate", c.fault_rate},
        {"trials", c.accuracies.size()},
        {"mean", c.stats.mean},
        {"stddev", c.stats.stddev},
        {"min", c.stats.min},
        {"q25", c.stats.q25},
        {"median", c.stats.median},
        {"q75", c.stats.q75},
        {"max", c.stats.max},
    });
  }
  j["cells"] = cells;
  return j.dump(2) + "\n";
}

std::vector<SweepRow> sweep_global_bound(const Network& net, std::size_t layer_index,
                                         const std::vector<double>& bound_values, double fault_rate, int trials,
                                         GBReluMode mode, std::uint64_t seed, const Dataset& eval_set) {
  if (layer_index >= net.layers.size()) {
    throw ConfigError("sweep_global_bound: layer index " + std::to_string(layer_index) + " outside network of " +
                      std::to_string(net.layers.size()) + " layers");
  }
  const Layer& target = net.layers[layer_index];
  if (target.kind != LayerKind::dense && target.kind != LayerKind::conv2d) {
    throw ConfigError("sweep_global_bound: layer " + std::to_string(layer_index) + " (" + to_string(target.kind) +
                      ") has no activation to bound");
  }
  if (bound_values.empty()) throw ConfigError("sweep_global_bound: no bound values");
  if (trials < 1) throw ConfigError("sweep_global_bound: trials must be >= 1");

  // Faults go into the swept layer and everything upstream of it, so the
  // bounded activation sits between every injection site and the output.
  std::vector<std::string> scope;
  for (const CensusEntry& e : parameter_census(net)) {
    if (e.layer_index <= layer_index && e.kind != ParamKind::lambda) scope.push_back(e.id);
  }

  std::vector<SweepRow> rows;
  for (std::size_t bi = 0; bi < bound_values.size(); ++bi) {
    Network bounded = net;
    ActivationConfig act;
    act.kind = ActivationKind::gbrelu;
    act.mode = mode;
    act.global_bound = bound_values[bi];
    bounded.layers[layer_index].activation = act;
    bounded.layers[layer_index].lambda = FixedTensor{};
    bounded.validate();

    SweepRow row;
    row.bound = bound_values[bi];
    row.clean_accuracy = evaluate_accuracy(bounded, eval_set);
    const std::vector<CensusEntry> census = parameter_census(bounded);
    double total = 0.0;
    for (int t = 0; t < trials; ++t) {
      FaultModel fm;
      fm.fault_rate = fault_rate;
      fm.scope = scope;
      fm.seed = derive_seed(seed, {static_cast<std::uint64_t>(t)});  // paired across bounds
      total += run_trial(bounded, sample_faults(fm, census), eval_set);
    }
    row.mean_faulted_accuracy = total / trials;
    rows.push_back(row);
  }
  return rows;
}

std::string sweep_csv(const std::vector<SweepRow>& rows) {
  std::ostringstream out;
  out << "bound,clean_accuracy,mean_faulted_accuracy\n";
  for (const SweepRow& r : rows) {
    out << fmt_double(r.bound) << "," << fmt_double(r.clean_accuracy) << "," << fmt_double(r.mean_faulted_accuracy)
        << "\n";
  }
  return out.str();
}

NeuronMaxHistogram neuron_max_histogram(const Network& net, std::size_t layer_index, const Dataset& ds,
                                        std::size_t bins) {
  if (layer_index >= net.layers.size() || net.layers[layer_index].activation.kind == ActivationKind::identity) {
    throw ConfigError("neuron_max_histogram: layer " + std::to_string(layer_index) + " is not an activation site");
  }
  if (bins == 0) throw ConfigError("neuron_max_histogram: need at least one bin");
  const auto maxima = collect_activation_maxima(net, ds);
  NeuronMaxHistogram h;
  h.maxima = maxima.at(layer_index);

  double lo = h.maxima[0], hi = h.maxima[0];
  for (double v : h.maxima) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  if (lo == hi) {
    h.bin_edges = {lo, hi};
    h.counts = {h.maxima.size()};
    return h;
  }
  h.bin_edges.resize(bins + 1);
  for (std::size_t i = 0; i <= bins; ++i) {
    h.bin_edges[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(bins);
  }
  h.counts.assign(bins, 0);
  for (double v : h.maxima) {
    std::size_t b = static_cast<std::size_t>((v - lo) / (hi - lo) * static_cast<double>(bins));
    if (b >= bins) b = bins - 1;
    ++h.counts[b];
  }
  return h;
}

std::string histogram_csv(const NeuronMaxHistogram& h) {
  std::ostringstream out;
  out << "bin_lo,bin_hi,count\n";
  for (std::size_t i = 0; i < h.counts.size(); ++i) {
    out << fmt_double(h.bin_edges[i]) << "," << fmt_double(h.bin_edges[i + 1]) << "," << h.counts[i] << "\n";
  }
  return out.str();
}

OverheadReport measure_overhead(const Network& baseline, const Network& fitact_model, const Tensor& sample_input,
                                int repetitions, int warmups) {
  if (repetitions < 1) throw ConfigError("measure_overhead: repetitions must be >= 1");
  const auto median_forward_ns = [&](const Network& net) {
    double sink = 0.0;
    for (int i = 0; i < warmups; ++i) sink += forward(net, sample_input)[0];
    std::vector<double> times;
    times.reserve(static_cast<std::size_t>(repetitions));
    for (int i = 0; i < repetitions; ++i) {
      const auto t0 = std::chrono::steady_clock::now();
      sink += forward(net, sample_input)[0];
      const auto t1 = std::chrono::steady_clock::now();
      times.push_back(static_cast<double>(std::chrono::duration_cast<std::chrono::nanoseconds>(t1 - t0).count()));
    }
    volatile double keep = sink;  // the timed calls must not be elided
    (void)keep;
    std::sort(times.begin(), times.end());
    return times[times.size() / 2];
  };

  OverheadReport r;
  r.repetitions = repetitions;
  r.warmups = warmups;
  r.baseline_ns = median_forward_ns(baseline);
  r.fitact_ns = median_forward_ns(fitact_model);
  r.runtime_overhead = (r.fitact_ns - r.baseline_ns) / r.baseline_ns;
  r.baseline_bytes = serialized_size(baseline);
  r.fitact_bytes = serialized_size(fitact_model);
  r.memory_overhead =
      (static_cast<double>(r.fitact_bytes) - static_cast<double>(r.baseline_bytes)) / static_cast<double>(r.baseline_bytes);
  return r;
}

std::string overhead_json(const OverheadReport& r) {
  nlohmann::json j;
  j["runtime"] = {
      {"baseline_ns", r.baseline_ns},
      {"fitact_ns", r.fitact_ns},
      {"overhead", r.runtime_overhead},
      {"repetitions", r.repetitions},
      {"warmups", r.warmups},
  };
  j["memory"] = {
      {"baseline_bytes", r.baseline_bytes},
      {"fitact_bytes", r.fitact_bytes},
      {"overhead", r.memory_overhead},
  };
  return j.dump(2) + "\n";
}

}  // namespace fitact
