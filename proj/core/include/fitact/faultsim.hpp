#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "fitact/dataset.hpp"
#include "fitact/network.hpp"

namespace fitact {

/// One flipped bit in a stored parameter word.
struct BitFlipEvent {
  std::string target_id;  // census buffer id
  std::size_t element_index = 0;
  int bit_position = 0;

  friend bool operator==(const BitFlipEvent& a, const BitFlipEvent& b) {
    return a.target_id == b.target_id && a.element_index == b.element_index && a.bit_position == b.bit_position;
  }
};

/// Per-bit flip probability over a subset of the parameter fault space.
struct FaultModel {
  double fault_rate = 0.0;
  std::vector<std::string> scope;  // census ids; empty means the whole census
  std::uint64_t seed = 0;
};

/// The sampled outcome of one injection: a distinct set of bit positions,
/// persistent for the whole evaluation.
struct FaultTrial {
  std::uint64_t stream_id = 0;
  std::vector<BitFlipEvent> events;
};

/// Draws the flip count from Binomial(total_bits_in_scope, rate), then picks
/// that many distinct bit positions uniformly. Fully determined by the seed.
FaultTrial sample_faults(const FaultModel& model, const std::vector<CensusEntry>& census);

/// Deep copy with every event's bit XOR-flipped; the input stays pristine.
Network apply_faults(const Network& net, const FaultTrial& trial);

/// Accuracy of the faulted copy on the evaluation set.
double run_trial(const Network& net, const FaultTrial& trial, const Dataset& eval_set);

/// One `buffer_id,element_index,bit_position` line per event; accepted back
/// by read_fault_log for exact replay.
void write_fault_log(const FaultTrial& trial, std::ostream& out);
void write_fault_log(const FaultTrial& trial, const std::string& path);
FaultTrial read_fault_log(std::istream& in);
FaultTrial read_fault_log(const std::string& path);

}  // namespace fitact
