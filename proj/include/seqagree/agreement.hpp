#pragma once

// Observed, chance and chance-corrected token-level F1.
//
// Token F1 is 2a / (a1 + a2) where a counts tokens covered by both
// annotations. The denominator is fixed by the two segment profiles, so the
// expected F1 under independent random placement is 2 E[a] / (a1 + a2), and
// E[a] = sum_t P(annotator 1 covers t) * P(annotator 2 covers t).

#include <cmath>
#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "combinatorics.hpp"
#include "count.hpp"
#include "types.hpp"

namespace seqagree {

/// Chance values within this distance of 1 are treated as degenerate.
inline constexpr double kDegenerateChanceTolerance = 1e-12;

/// Number of tokens covered by both annotations.
inline std::size_t intersection_size(const PlacedAnnotation& a, const PlacedAnnotation& b) {
  std::size_t shared = 0;
  auto i = a.spans().begin();
  auto j = b.spans().begin();
  while (i != a.spans().end() && j != b.spans().end()) {
    const std::size_t lo = std::max(i->start, j->start);
    const std::size_t hi = std::min(i->end(), j->end());
    if (hi > lo) shared += hi - lo;
    if (i->end() < j->end())
      ++i;
    else
      ++j;
  }
  return shared;
}

/// 2a/(a1+a2); 1 when both annotations are empty.
inline double token_f1(const SequenceSpec& seq, const PlacedAnnotation& first,
                       const PlacedAnnotation& second) {
  first.check_within(seq);
  second.check_within(seq);
  const std::size_t total = first.covered() + second.covered();
  if (total == 0) return 1.0;
  return 2.0 * static_cast<double>(intersection_size(first, second)) / static_cast<double>(total);
}

/// P(segment covers token t) for t = 1..n, as a 0-based vector.
inline std::vector<double> coverage_probabilities(const LocationDistribution& dist) {
  const std::size_t n = dist.sequence_length;
  std::vector<long double> prefix(dist.probs.size() + 1, 0.0L);
  for (std::size_t l = 0; l < dist.probs.size(); ++l) prefix[l + 1] = prefix[l] + dist.probs[l];
  std::vector<double> cover(n, 0.0);
  for (std::size_t t = 1; t <= n; ++t) {
    // starts l with l <= t <= l + len - 1
    const std::size_t hi = std::min(t, dist.probs.size());
    const std::size_t lo = t >= dist.segment_length ? t - dist.segment_length + 1 : 1;
    if (lo <= hi) cover[t - 1] = static_cast<double>(prefix[hi] - prefix[lo - 1]);
  }
  return cover;
}

/// Expected number of shared tokens between two independently placed segments.
inline double expected_pair_overlap(const LocationDistribution& first,
                                    const LocationDistribution& second) {
  if (first.sequence_length != second.sequence_length)
    throw InvalidArgument("distributions are over different sequence lengths");
  const auto c1 = coverage_probabilities(first);
  const auto c2 = coverage_probabilities(second);
  CompensatedSum<long double> sum;
  for (std::size_t t = 0; t < c1.size(); ++t) sum.add(static_cast<long double>(c1[t]) * c2[t]);
  return static_cast<double>(sum.value());
}

/// Per-token coverage probability of a whole random annotation, i.e. the
/// sum of its segments' coverage probabilities.
struct ProfileCoverage {
  std::vector<double> coverage;
  std::size_t total_length = 0;
  ComputeMode mode = ComputeMode::exact;
};

inline ProfileCoverage profile_coverage(const SequenceSpec& seq, const SegmentProfile& profile,
                                        const ModelOptions& options = {}) {
  ProfileCoverage out;
  out.coverage.assign(seq.length(), 0.0);
  out.total_length = profile.total_length();
  if (profile.empty()) return out;
  const auto dists = location_distributions(seq, profile, options);
  std::vector<CompensatedSum<long double>> acc(seq.length());
  for (const auto& d : dists) {
    out.mode = coarser(out.mode, d.compute_mode());
    const auto c = coverage_probabilities(d);
    for (std::size_t t = 0; t < c.size(); ++t) acc[t].add(c[t]);
  }
  for (std::size_t t = 0; t < acc.size(); ++t) out.coverage[t] = static_cast<double>(acc[t].value());
  return out;
}

/// E[a] and the fixed denominator a1 + a2 for one pair of profiles.
struct ExpectedAgreement {
  double expected_intersection = 0.0;
  std::size_t total_length = 0;
  ComputeMode mode = ComputeMode::exact;

  /// Chance F1; 1 for two empty profiles.
  double f1() const {
    if (total_length == 0) return 1.0;
    return 2.0 * expected_intersection / static_cast<double>(total_length);
  }
};

inline double expected_intersection(const ProfileCoverage& first, const ProfileCoverage& second) {
  if (first.coverage.size() != second.coverage.size())
    throw InvalidArgument("coverages are over different sequence lengths");
  CompensatedSum<long double> sum;
  for (std::size_t t = 0; t < first.coverage.size(); ++t)
    sum.add(static_cast<long double>(first.coverage[t]) * second.coverage[t]);
  return static_cast<double>(sum.value());
}

inline ExpectedAgreement expected_agreement(const ProfileCoverage& first,
                                            const ProfileCoverage& second) {
  return {expected_intersection(first, second), first.total_length + second.total_length,
          coarser(first.mode, second.mode)};
}

inline ExpectedAgreement expected_agreement(const SequenceSpec& seq, const SegmentProfile& first,
                                            const SegmentProfile& second,
                                            const ModelOptions& options = {}) {
  return expected_agreement(profile_coverage(seq, first, options),
                            profile_coverage(seq, second, options));
}

/// Expected token F1 between two independent random annotations.
inline double chance_f1(const SequenceSpec& seq, const SegmentProfile& first,
                        const SegmentProfile& second, const ModelOptions& options = {}) {
  return expected_agreement(seq, first, second, options).f1();
}

/// (observed - chance) / (1 - chance). May be negative; never clamped.
inline double corrected_f1(double observed, double chance) {
  if (chance >= 1.0 - kDegenerateChanceTolerance)
    throw DegenerateChance("chance agreement is 1; every random annotation agrees");
  return (observed - chance) / (1.0 - chance);
}

/// 1 - average pairwise chance F1 over all v^2 ordered profile pairs. A
/// single profile compares two independent randomizations of itself.
inline double difficulty(const SequenceSpec& seq, const std::vector<SegmentProfile>& profiles,
                         const ModelOptions& options = {}) {
  if (profiles.empty()) throw InvalidArgument("difficulty needs at least one profile");
  std::vector<ProfileCoverage> cover;
  cover.reserve(profiles.size());
  for (const auto& p : profiles) cover.push_back(profile_coverage(seq, p, options));
  CompensatedSum<long double> sum;
  for (const auto& x : cover)
    for (const auto& y : cover) sum.add(expected_agreement(x, y).f1());
  const auto v = static_cast<long double>(profiles.size());
  return static_cast<double>(1.0L - sum.value() / (v * v));
}

/// Alternative reading: gold stays where it is, one random copy of its profile
/// is compared against it.
inline double difficulty_against_fixed(const SequenceSpec& seq, const PlacedAnnotation& gold,
                                       const ModelOptions& options = {}) {
  const auto mask = gold.mask(seq);
  const auto cover = profile_coverage(seq, gold.profile(), options);
  if (cover.total_length == 0) return 0.0;
  CompensatedSum<long double> shared;
  for (std::size_t t = 0; t < mask.size(); ++t)
    if (mask[t]) shared.add(cover.coverage[t]);
  return static_cast<double>(1.0L - shared.value() / static_cast<long double>(cover.total_length));
}

/// Probability that two independent random annotations share no token:
/// pi(n-a1-a2+k1+k2, k1+k2) / (pi(n-a1+k1, k1) pi(n-a2+k2, k2)).
inline double zero_agreement_probability(const SequenceSpec& seq, const SegmentProfile& first,
                                         const SegmentProfile& second,
                                         const ModelOptions& options = {}) {
  const std::size_t n = seq.length();
  const std::size_t a = first.total_length() + second.total_length();
  if (a > n) return 0.0;
  const std::size_t k = first.count() + second.count();
  const SegmentProfile joint = [&] {
    std::vector<std::size_t> lengths = first.lengths();
    lengths.insert(lengths.end(), second.lengths().begin(), second.lengths().end());
    return SegmentProfile(std::move(lengths));
  }();
  if (options.exact_for(seq, joint)) {
    const BigCount num = falling_factorial(n - a + k, k);
    const BigCount den = total_configurations(seq, first) * total_configurations(seq, second);
    return ratio_to_double(num, den);
  }
  const long double log_p = log_falling_factorial(n - a + k, k) -
                            log_total_configurations(seq, first) -
                            log_total_configurations(seq, second);
  return static_cast<double>(std::exp(log_p));
}

// Reports ----------------------------------------------------------------------

/// Scores for one scope (overall or one entity type).
struct Scores {
  double observed_f1 = 0.0;
  double chance_f1 = 0.0;
  std::optional<double> corrected_f1;  // empty when chance is degenerate
  std::optional<double> difficulty;

  friend bool operator==(const Scores&, const Scores&) = default;
};

inline Scores make_scores(double observed, double chance, std::optional<double> difficulty = {}) {
  Scores s{observed, chance, std::nullopt, difficulty};
  if (chance < 1.0 - kDegenerateChanceTolerance) s.corrected_f1 = corrected_f1(observed, chance);
  return s;
}

struct AgreementReport {
  double observed_f1 = 0.0;
  double chance_f1 = 0.0;
  std::optional<double> corrected_f1;
  std::optional<double> difficulty;
  Model model = Model::non_overlapping;
  ComputeMode mode = ComputeMode::exact;
  std::map<std::string, Scores> per_type;
  double runtime_seconds = 0.0;

  Scores scores() const { return {observed_f1, chance_f1, corrected_f1, difficulty}; }
  void set_scores(const Scores& s) {
    observed_f1 = s.observed_f1;
    chance_f1 = s.chance_f1;
    corrected_f1 = s.corrected_f1;
    difficulty = s.difficulty;
  }
  friend bool operator==(const AgreementReport&, const AgreementReport&) = default;
};

/// Full pairwise report on one sequence. Difficulty treats the first
/// annotation as the reference.
inline AgreementReport agree(const SequenceSpec& seq, const PlacedAnnotation& first,
                             const PlacedAnnotation& second, const ModelOptions& options = {},
                             bool fixed_reference = false) {
  AgreementReport r;
  r.model = options.model;
  const auto c1 = profile_coverage(seq, first.profile(), options);
  const auto c2 = profile_coverage(seq, second.profile(), options);
  const auto expected = expected_agreement(c1, c2);
  const double diff = fixed_reference ? difficulty_against_fixed(seq, first, options)
                                      : 1.0 - expected_agreement(c1, c1).f1();
  r.set_scores(make_scores(token_f1(seq, first, second), expected.f1(), diff));
  r.mode = expected.mode;
  return r;
}

}  // namespace seqagree
