#include "fitact/faultsim.hpp"

#include <algorithm>
#include <fstream>
#include <random>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "fitact/errors.hpp"
#include "fitact/train.hpp"

namespace fitact {

namespace {

std::vector<CensusEntry> scoped_census(const FaultModel& model, const std::vector<CensusEntry>& census) {
  if (model.scope.empty()) return census;
  std::unordered_set<std::string> wanted(model.scope.begin(), model.scope.end());
  std::vector<CensusEntry> out;
  for (const CensusEntry& e : census) {
    if (wanted.erase(e.id)) out.push_back(e);
  }
  if (!wanted.empty()) {
    throw ConfigError("fault scope names unknown buffer '" + *wanted.begin() + "'");
  }
  return out;
}

}  // namespace

FaultTrial sample_faults(const FaultModel& model, const std::vector<CensusEntry>& census) {
  if (model.fault_rate < 0.0 || model.fault_rate > 1.0) {
    throw ConfigError("fault rate must lie in [0,1], got " + std::to_string(model.fault_rate));
  }
  const std::vector<CensusEntry> scoped = scoped_census(model, census);
  std::vector<std::size_t> prefix;  // bit offset of each buffer
  std::size_t total_bits = 0;
  for (const CensusEntry& e : scoped) {
    prefix.push_back(total_bits);
    total_bits += e.bits_total;
  }

  FaultTrial trial;
  trial.stream_id = model.seed;
  if (total_bits == 0 || model.fault_rate == 0.0) return trial;

  std::mt19937_64 eng(model.seed);
  std::size_t flips;
  if (model.fault_rate >= 1.0) {
    flips = total_bits;
  } else {
    std::binomial_distribution<long long> binom(static_cast<long long>(total_bits), model.fault_rate);
    flips = static_cast<std::size_t>(binom(eng));
  }

  // Floyd's sampling: `flips` distinct positions out of total_bits.
  std::unordered_set<std::size_t> chosen;
  chosen.reserve(flips * 2);
  for (std::size_t j = total_bits - flips; j < total_bits; ++j) {
    std::uniform_int_distribution<std::size_t> pick(0, j);
    const std::size_t r = pick(eng);
    if (!chosen.insert(r).second) chosen.insert(j);
  }
  std::vector<std::size_t> positions(chosen.begin(), chosen.end());
  std::sort(positions.begin(), positions.end());

  trial.events.reserve(positions.size());
  for (std::size_t pos : positions) {
    const std::size_t bucket =
        static_cast<std::size_t>(std::upper_bound(prefix.begin(), prefix.end(), pos) - prefix.begin()) - 1;
    const std::size_t offset = pos - prefix[bucket];
    BitFlipEvent e;
    e.target_id = scoped[bucket].id;
    e.element_index = offset / 32;
    e.bit_position = static_cast<int>(offset % 32);
    trial.events.push_back(std::move(e));
  }
  return trial;
}

Network apply_faults(const Network& net, const FaultTrial& trial) {
  Network copy = net;
  std::unordered_map<std::string, CensusEntry> by_id;
  for (const CensusEntry& e : parameter_census(copy)) by_id.emplace(e.id, e);
  for (const BitFlipEvent& ev : trial.events) {
    const auto it = by_id.find(ev.target_id);
    if (it == by_id.end()) {
      throw FaultError("fault event targets unknown buffer '" + ev.target_id + "'");
    }
    const CensusEntry& entry = it->second;
    if (ev.element_index >= entry.element_count) {
      throw FaultError("fault event " + ev.target_id + "[" + std::to_string(ev.element_index) +
                       "] outside buffer of " + std::to_string(entry.element_count) + " elements");
    }
    FixedTensor& buf = param_buffer(copy, entry.layer_index, entry.kind);
    buf.words[ev.element_index] = flip_bit(buf.words[ev.element_index], ev.bit_position);
  }
  return copy;
}

double run_trial(const Network& net, const FaultTrial& trial, const Dataset& eval_set) {
  const Network faulted = apply_faults(net, trial);
  return evaluate_accuracy(faulted, eval_set);
}

void write_fault_log(const FaultTrial& trial, std::ostream& out) {
  out << "# fault log v1 stream=" << trial.stream_id << "\n";
  out << "buffer_id,element_index,bit_position\n";
  for (const BitFlipEvent& e : trial.events) {
    out << e.target_id << "," << e.element_index << "," << e.bit_position << "\n";
  }
}

void write_fault_log(const FaultTrial& trial, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path + " for writing");
  write_fault_log(trial, out);
}

FaultTrial read_fault_log(std::istream& in) {
  FaultTrial trial;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    if (line == "buffer_id,element_index,bit_position") continue;
    std::istringstream row(line);
    BitFlipEvent e;
    std::string field;
    if (!std::getline(row, e.target_id, ',') || !std::getline(row, field, ',')) {
      throw FormatError(FormatError::Kind::bad_value, "malformed fault log line " + std::to_string(lineno));
    }
    try {
      e.element_index = std::stoull(field);
      if (!std::getline(row, field)) throw std::invalid_argument("missing bit");
      e.bit_position = std::stoi(field);
    } catch (const std::exception&) {
      throw FormatError(FormatError::Kind::bad_value, "malformed fault log line " + std::to_string(lineno));
    }
    trial.events.push_back(std::move(e));
  }
  return trial;
}

FaultTrial read_fault_log(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  return read_fault_log(in);
}

}  // namespace fitact
