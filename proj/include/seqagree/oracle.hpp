#pragma once

// Ground truth for the analytic formulas: exhaustive enumeration of every
// configuration for small instances, and an exactly uniform sampler.
//
// A configuration of k segments with total length a on n tokens corresponds
// one-to-one to (a k-subset of the n-a+k "slots", an ordering of the
// segments): collapse each segment to a single slot, and the remaining n-a
// slots are free tokens.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numeric>
#include <optional>
#include <vector>

#include "agreement.hpp"
#include "combinatorics.hpp"
#include "count.hpp"
#include "rng.hpp"
#include "types.hpp"

namespace seqagree {

inline constexpr std::uint64_t kDefaultEnumerationBudget = 10'000'000;

/// Placement of every segment of a profile; segments[i-1] is segment i.
struct Configuration {
  std::vector<Span> segments;

  std::size_t start_of(std::size_t segment) const { return segments.at(segment - 1).start; }
  PlacedAnnotation annotation() const { return PlacedAnnotation(segments); }
};

namespace detail {

/// Map sorted slot positions (1-based, among n-a+k) and a segment order to starts.
inline Configuration decode_slots(const SegmentProfile& profile, const std::vector<std::size_t>& slots,
                                  const std::vector<std::size_t>& order) {
  Configuration c;
  c.segments.resize(profile.count());
  std::size_t offset = 0;
  for (std::size_t j = 0; j < order.size(); ++j) {
    const std::size_t len = profile.lengths()[order[j]];
    c.segments[order[j]] = Span{slots[j] + offset, len};
    offset += len - 1;
  }
  return c;
}

inline std::uint64_t checked_total(const SequenceSpec& seq, const SegmentProfile& profile,
                                   std::uint64_t budget) {
  const BigCount total = total_configurations(seq, profile);
  if (total > budget)
    throw BudgetExceeded("configuration count " + total.str() + " exceeds budget " +
                         std::to_string(budget));
  return total.convert_to<std::uint64_t>();
}

}  // namespace detail

/// Single-pass stream over all non-overlapping placements of distinguishable
/// segments. Each configuration is produced exactly once.
class ConfigurationStream {
 public:
  ConfigurationStream(const SequenceSpec& seq, const SegmentProfile& profile,
                      std::uint64_t budget = kDefaultEnumerationBudget)
      : profile_(profile), size_(detail::checked_total(seq, profile, budget)) {
    done_ = size_ == 0;
    if (!done_) slot_count_ = seq.length() - profile.total_length() + profile.count();
  }

  std::uint64_t size() const { return size_; }

  std::optional<Configuration> next() {
    if (done_) return std::nullopt;
    if (!started_) {
      started_ = true;
      order_.resize(profile_.count());
      std::iota(order_.begin(), order_.end(), std::size_t{0});
      slots_.resize(profile_.count());
      std::iota(slots_.begin(), slots_.end(), std::size_t{1});
    } else if (!advance_slots()) {
      if (!std::next_permutation(order_.begin(), order_.end())) {
        done_ = true;
        return std::nullopt;
      }
      std::iota(slots_.begin(), slots_.end(), std::size_t{1});
    }
    return detail::decode_slots(profile_, slots_, order_);
  }

 private:
  // Next k-subset of {1..slot_count_} in lexicographic order.
  bool advance_slots() {
    const std::size_t k = slots_.size();
    for (std::size_t j = k; j-- > 0;) {
      if (slots_[j] < slot_count_ - (k - 1 - j)) {
        ++slots_[j];
        for (std::size_t q = j + 1; q < k; ++q) slots_[q] = slots_[q - 1] + 1;
        return true;
      }
    }
    return false;
  }

  SegmentProfile profile_;
  std::uint64_t size_ = 0;
  std::size_t slot_count_ = 0;
  bool started_ = false;
  bool done_ = false;
  std::vector<std::size_t> order_;
  std::vector<std::size_t> slots_;
};

inline ConfigurationStream enumerate_configurations(const SequenceSpec& seq,
                                                    const SegmentProfile& profile,
                                                    std::uint64_t budget = kDefaultEnumerationBudget) {
  return ConfigurationStream(seq, profile, budget);
}

template <typename Fn>
void for_each_configuration(const SequenceSpec& seq, const SegmentProfile& profile, Fn&& fn,
                            std::uint64_t budget = kDefaultEnumerationBudget) {
  ConfigurationStream stream(seq, profile, budget);
  while (auto c = stream.next()) fn(*c);
}

/// Start-index histogram of segment i over all configurations (raw counts).
inline std::vector<BigCount> enumerated_location_counts(const SequenceSpec& seq,
                                                        const SegmentProfile& profile,
                                                        std::size_t segment,
                                                        std::uint64_t budget = kDefaultEnumerationBudget) {
  const std::size_t len = profile.length_of(segment);
  std::vector<std::uint64_t> hist(seq.length() >= len ? seq.length() - len + 1 : 0, 0);
  for_each_configuration(seq, profile, [&](const Configuration& c) { ++hist[c.start_of(segment) - 1]; },
                         budget);
  return {hist.begin(), hist.end()};
}

/// Average token F1 over the full cross product of both configuration sets.
inline double exact_expected_f1(const SequenceSpec& seq, const SegmentProfile& first,
                                const SegmentProfile& second,
                                std::uint64_t budget = kDefaultEnumerationBudget) {
  if (!first.fits(seq) || !second.fits(seq))
    throw InfeasibleProfile("profile does not fit the sequence");
  const BigCount pairs = total_configurations(seq, first) * total_configurations(seq, second);
  if (pairs > budget)
    throw BudgetExceeded("pair count " + pairs.str() + " exceeds budget " + std::to_string(budget));
  const std::size_t denominator = first.total_length() + second.total_length();
  if (denominator == 0) return 1.0;

  std::vector<std::vector<char>> masks;
  for_each_configuration(seq, first, [&](const Configuration& c) { masks.push_back(c.annotation().mask(seq)); });
  // F1 = 2a/(a1+a2) with a fixed denominator, so summing a keeps everything integral.
  BigCount shared = 0;
  for_each_configuration(seq, second, [&](const Configuration& c) {
    const auto mine = c.annotation().mask(seq);
    std::uint64_t local = 0;
    for (const auto& other : masks)
      for (std::size_t t = 0; t < mine.size(); ++t) local += static_cast<std::uint64_t>(mine[t] & other[t]);
    shared += local;
  });
  return ratio_to_double(2 * shared, pairs * denominator);
}

/// Exactly uniform random configuration: uniform k-subset of the slots
/// (Floyd's algorithm) and a uniform segment order (Fisher-Yates).
inline Configuration sample_configuration(const SequenceSpec& seq, const SegmentProfile& profile,
                                          Rng& rng) {
  detail::check_feasible(seq, profile);
  const std::size_t k = profile.count();
  const std::size_t slot_count = seq.length() - profile.total_length() + k;
  std::vector<std::size_t> slots;
  slots.reserve(k);
  for (std::size_t j = slot_count - k + 1; j <= slot_count; ++j) {
    const std::size_t t = static_cast<std::size_t>(rng.below(j)) + 1;
    if (std::find(slots.begin(), slots.end(), t) == slots.end())
      slots.push_back(t);
    else
      slots.push_back(j);
  }
  std::sort(slots.begin(), slots.end());
  std::vector<std::size_t> order(k);
  std::iota(order.begin(), order.end(), std::size_t{0});
  rng.shuffle(order);
  return detail::decode_slots(profile, slots, order);
}

/// Monte Carlo estimate with its standard error and provenance.
struct McEstimate {
  double mean = 0.0;
  double standard_error = 0.0;
  std::uint64_t samples = 0;
  std::uint64_t seed = 0;
  const char* algorithm = Rng::kAlgorithm;
};

/// Mean token F1 of independently sampled configuration pairs. Annotator 1
/// draws from stream 0 of the seed, annotator 2 from stream 1.
inline McEstimate mc_expected_f1(const SequenceSpec& seq, const SegmentProfile& first,
                                 const SegmentProfile& second, std::uint64_t samples,
                                 std::uint64_t seed) {
  if (samples < 2) throw InvalidArgument("Monte Carlo needs at least 2 samples");
  Rng rng1 = Rng::split(seed, 0);
  Rng rng2 = Rng::split(seed, 1);
  // Welford
  long double mean = 0.0L;
  long double m2 = 0.0L;
  for (std::uint64_t s = 1; s <= samples; ++s) {
    const auto x = sample_configuration(seq, first, rng1).annotation();
    const auto y = sample_configuration(seq, second, rng2).annotation();
    const long double f = token_f1(seq, x, y);
    const long double delta = f - mean;
    mean += delta / static_cast<long double>(s);
    m2 += delta * (f - mean);
  }
  const long double variance = m2 / static_cast<long double>(samples - 1);
  return {static_cast<double>(mean),
          static_cast<double>(std::sqrt(variance / static_cast<long double>(samples))), samples, seed,
          Rng::kAlgorithm};
}

/// Normalized start histogram of segment i over sampled configurations.
inline std::vector<double> empirical_location_distribution(const SequenceSpec& seq,
                                                           const SegmentProfile& profile,
                                                           std::size_t segment, std::uint64_t samples,
                                                           std::uint64_t seed) {
  if (samples < 1) throw InvalidArgument("need at least one sample");
  const std::size_t len = profile.length_of(segment);
  detail::check_feasible(seq, profile);
  std::vector<std::uint64_t> hist(seq.length() - len + 1, 0);
  Rng rng(seed);
  for (std::uint64_t s = 0; s < samples; ++s) ++hist[sample_configuration(seq, profile, rng).start_of(segment) - 1];
  std::vector<double> out;
  out.reserve(hist.size());
  for (auto h : hist) out.push_back(static_cast<double>(h) / static_cast<double>(samples));
  return out;
}

}  // namespace seqagree
