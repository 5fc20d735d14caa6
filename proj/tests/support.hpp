#pragma once

// Shared test fixtures and independent oracles.

#include <cstdint>
#include <string>
#include <vector>

#include "seqagree/seqagree.hpp"

namespace seqagree::testing {

/// "0 0 1 1 0" style token strings (whitespace ignored) to spans.
inline PlacedAnnotation from_bits(const std::string& bits, std::size_t* length = nullptr) {
  std::vector<Span> spans;
  std::size_t t = 0;
  bool inside = false;
  for (char c : bits) {
    if (c != '0' && c != '1') continue;
    ++t;
    if (c == '1') {
      if (inside)
        ++spans.back().length;
      else
        spans.push_back({t, 1});
    }
    inside = c == '1';
  }
  if (length) *length = t;
  return PlacedAnnotation(std::move(spans));
}

/// Expected overlap by the plain O(n^2) double sum over both starts.
inline double double_sum_pair_overlap(const LocationDistribution& d1, const LocationDistribution& d2) {
  long double total = 0;
  for (std::size_t l1 = 1; l1 <= d1.support_size(); ++l1)
    for (std::size_t l2 = 1; l2 <= d2.support_size(); ++l2) {
      const long double hi = std::min(l1 + d1.segment_length, l2 + d2.segment_length);
      const long double lo = std::max(l1, l2);
      if (hi > lo) total += static_cast<long double>(d1.at(l1)) * d2.at(l2) * (hi - lo);
    }
  return static_cast<double>(total);
}

/// Simulation fixtures: (annotation 1, annotation 2) bit strings.
struct SimCase {
  const char* name;
  const char* first;
  const char* second;
  double observed;
  double chance;
  double corrected;
};

// Token strings and reported values from the simulation tables.
inline const std::vector<SimCase>& simulation_cases() {
  static const std::vector<SimCase> cases = {
      {"Sim1 CaseA", "0 0 0 1 1 0 0 0 1 1 1 0 0 0 1 1 1 1 0 0",
       "0 0 1 1 1 0 0 0 1 1 1 1 0 0 1 1 1 1 1 0", 0.8571, 0.5335, 0.6938},
      {"Sim1 CaseB", "0 0 0 1 1 0 0 0 1 1 1 0 0 0 1 1 1 1 0 0 0 0 0 0 0 0 0 0 0 0",
       "0 0 1 1 1 0 0 0 1 1 1 1 0 0 1 1 1 1 1 0 0 0 0 0 0 0 0 0 0 0", 0.8571, 0.3544, 0.7787},
      {"Sim2 CaseA", "0 0 0 1 1 0 0 0 1 1 1 0 0 0 1 1 1 1 0 0",
       "0 0 1 1 1 0 0 0 1 1 1 1 0 0 1 1 1 1 1 0", 0.8571, 0.5335, 0.6938},
      {"Sim2 CaseB", "0 0 0 0 0 0 1 1 1 1 1 1 1 1 1 0 0 0 0 0",
       "0 0 0 0 1 1 1 1 1 1 1 1 1 1 1 1 0 0 0 0", 0.8571, 0.6455, 0.5970},
      {"Sim3 CaseA", "0 0 0 0 0 0 0 0 1 1 1 0 0 0 0 0 0 0 0 0",
       "0 0 0 0 0 0 0 0 1 1 1 1 0 0 0 0 0 0 0 0", 0.8571, 0.1830, 0.8251},
      {"Sim3 CaseB", "0 0 0 0 0 0 1 1 1 1 1 1 1 1 1 0 0 0 0 0",
       "0 0 0 0 1 1 1 1 1 1 1 1 1 1 1 1 0 0 0 0", 0.8571, 0.6455, 0.5970},
  };
  return cases;
}

inline const char* kSim4Gold =
    "1 1 1 0 0 1 1 1 0 0 1 1 1 0 0 1 1 1 0 0 1 1 1 0 0 1 1 1 1 1 1 1 1 1 1 1 1 1 1 1 1";
inline const char* kSim4First =
    "1 1 1 0 0 1 1 1 0 0 1 1 1 0 0 1 1 1 0 0 1 1 1 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0";
inline const char* kSim4Second =
    "0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 1 1 1 1 1 1 1 1 1 1 1 1 1 1 1 1";

/// Small deterministic generator for test instances.
class InstanceGen {
 public:
  explicit InstanceGen(std::uint64_t seed) : rng_(seed) {}
  std::size_t uniform(std::size_t lo, std::size_t hi) {  // inclusive
    return lo + static_cast<std::size_t>(rng_.below(hi - lo + 1));
  }
  SegmentProfile profile(std::size_t max_k, std::size_t max_len, std::size_t min_k = 0) {
    std::vector<std::size_t> lengths(uniform(min_k, max_k));
    for (auto& l : lengths) l = uniform(1, max_len);
    return SegmentProfile(std::move(lengths));
  }
  Rng& rng() { return rng_; }

 private:
  Rng rng_;
};

}  // namespace seqagree::testing
