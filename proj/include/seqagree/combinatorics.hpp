#pragma once

// Placement counting for the random annotation model.
//
// A profile of k distinguishable segments with total length a is placed on n
// tokens without overlap; every configuration is equally likely. There are
// pi(n-a+k, k) configurations. Fixing segment i at start l splits the others
// into m segments on the left and k-m-1 on the right, so
//
//   count(l) = sum_{m, s} T[m][s] * pi(l-1-s+m, m) * pi(n-l-a+s+k-m, k-m-1)
//
// where T[m][s] is the number of m-subsets of the other lengths summing to s,
// pi(l-1-s+m, m) = m! * C(l-1-s+m, m) counts ordered left arrangements (weak
// compositions of the l-1-s free tokens into m+1 gaps) and the right factor
// does the same for the remaining segments. The count is constant for
// a-a_i-k+2 <= l <= n-a+k, so only the two ends need explicit evaluation.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "count.hpp"
#include "types.hpp"

namespace seqagree {

/// pi(n-a+k, k); 1 for the empty profile, 0 when a > n.
inline BigCount total_configurations(const SequenceSpec& seq, const SegmentProfile& profile) {
  if (!profile.fits(seq)) return 0;
  return falling_factorial(seq.length() - profile.total_length() + profile.count(), profile.count());
}

inline long double log_total_configurations(const SequenceSpec& seq, const SegmentProfile& profile) {
  if (!profile.fits(seq)) return kLogZero;
  return log_falling_factorial(seq.length() - profile.total_length() + profile.count(),
                               profile.count());
}

/// Inclusive range of start indices (1-based). Empty when first > last.
struct FlatRegion {
  std::size_t first = 1;
  std::size_t last = 0;

  bool empty() const { return first > last; }
  bool contains(std::size_t l) const { return l >= first && l <= last; }
  std::size_t size() const { return empty() ? 0 : last - first + 1; }
  friend bool operator==(const FlatRegion&, const FlatRegion&) = default;
};

namespace detail {

inline void check_segment(const SegmentProfile& profile, std::size_t segment) {
  if (profile.empty()) throw InvalidArgument("profile has no segments");
  if (segment == 0 || segment > profile.count())
    throw InvalidArgument("segment index " + std::to_string(segment) + " out of range 1.." +
                          std::to_string(profile.count()));
}

inline void check_feasible(const SequenceSpec& seq, const SegmentProfile& profile) {
  if (!profile.fits(seq))
    throw InfeasibleProfile("total annotated length " + std::to_string(profile.total_length()) +
                            " exceeds sequence length " + std::to_string(seq.length()));
}

inline std::size_t support_size(const SequenceSpec& seq, std::size_t segment_length) {
  return seq.length() - segment_length + 1;
}

}  // namespace detail

/// Start indices where the placement count of segment i is provably constant,
/// clamped to the support [1, n-a_i+1].
inline FlatRegion flat_region(const SequenceSpec& seq, const SegmentProfile& profile,
                              std::size_t segment) {
  detail::check_segment(profile, segment);
  detail::check_feasible(seq, profile);
  const auto n = static_cast<long long>(seq.length());
  const auto a = static_cast<long long>(profile.total_length());
  const auto k = static_cast<long long>(profile.count());
  const auto ai = static_cast<long long>(profile.length_of(segment));
  const long long lo = std::max(1LL, a - ai - k + 2);
  const long long hi = std::min(n - ai + 1, n - a + k);
  return {static_cast<std::size_t>(lo), static_cast<std::size_t>(hi)};
}

/// T[m][s]: number of m-element subsets of the other segments (all but the
/// excluded one) whose lengths sum to s; 0 <= m <= k-1, 0 <= s <= a-a_i.
template <typename Count>
class BasicSubsetLengthTable {
 public:
  BasicSubsetLengthTable(const SegmentProfile& profile, std::size_t excluded) {
    detail::check_segment(profile, excluded);
    rows_ = profile.count();
    cols_ = profile.total_length() - profile.length_of(excluded) + 1;
    cells_.assign(rows_ * cols_, Count(0));
    cell(0, 0) = Count(1);
    std::size_t used = 0;
    for (std::size_t j = 1; j <= profile.count(); ++j) {
      if (j == excluded) continue;
      const std::size_t len = profile.length_of(j);
      ++used;
      for (std::size_t m = used; m >= 1; --m)
        for (std::size_t s = cols_ - 1; s >= len; --s) {
          const Count& prev = cell(m - 1, s - len);
          if (prev != 0) cell(m, s) += prev;
          if (s == len) break;
        }
    }
  }

  std::size_t max_count() const { return rows_ - 1; }
  std::size_t max_length() const { return cols_ - 1; }
  const Count& at(std::size_t m, std::size_t s) const {
    static const Count zero(0);
    if (m >= rows_ || s >= cols_) return zero;
    return cells_[m * cols_ + s];
  }

 private:
  Count& cell(std::size_t m, std::size_t s) { return cells_[m * cols_ + s]; }

  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<Count> cells_;
};

using SubsetLengthTable = BasicSubsetLengthTable<BigCount>;

inline SubsetLengthTable subset_length_table(const SegmentProfile& profile, std::size_t excluded) {
  return SubsetLengthTable(profile, excluded);
}

/// Exact placement counts for one (sequence, profile). The falling-factorial
/// table pi(y, r) for r < k and y <= n+k is shared by all segments.
class PlacementCounter {
 public:
  PlacementCounter(const SequenceSpec& seq, const SegmentProfile& profile)
      : seq_(seq), profile_(profile) {
    detail::check_feasible(seq, profile);
    total_ = total_configurations(seq, profile);
    const std::size_t k = profile.count();
    width_ = seq.length() + k + 1;
    perms_.assign(k * width_, BigCount(0));
    for (std::size_t r = 0; r < k; ++r)
      for (std::size_t y = r; y < width_; ++y)
        perm_cell(r, y) = r == 0 ? BigCount(1) : perm_cell(r - 1, y - 1) * y;
  }

  const BigCount& total() const { return total_; }

  BigCount count(std::size_t segment, std::size_t start) const {
    detail::check_segment(profile_, segment);
    check_start(segment, start);
    return count_with(SubsetLengthTable(profile_, segment), start);
  }

  /// Counts for every start 1..n-a_i+1, evaluating the flat region once.
  std::vector<BigCount> counts(std::size_t segment) const {
    detail::check_segment(profile_, segment);
    const SubsetLengthTable table(profile_, segment);
    const FlatRegion flat = flat_region(seq_, profile_, segment);
    std::vector<BigCount> out(detail::support_size(seq_, profile_.length_of(segment)));
    std::optional<BigCount> flat_value;
    for (std::size_t l = 1; l <= out.size(); ++l) {
      if (flat.contains(l)) {
        if (!flat_value) flat_value = count_with(table, l);
        out[l - 1] = *flat_value;
      } else {
        out[l - 1] = count_with(table, l);
      }
    }
    return out;
  }

 private:
  void check_start(std::size_t segment, std::size_t start) const {
    const std::size_t support = detail::support_size(seq_, profile_.length_of(segment));
    if (start == 0 || start > support)
      throw InvalidArgument("start " + std::to_string(start) + " outside support 1.." +
                            std::to_string(support));
  }

  BigCount& perm_cell(std::size_t r, std::size_t y) { return perms_[r * width_ + y]; }
  const BigCount& perm(std::size_t r, std::size_t y) const { return perms_[r * width_ + y]; }

  BigCount count_with(const SubsetLengthTable& table, std::size_t l) const {
    const auto n = static_cast<long long>(seq_.length());
    const auto a = static_cast<long long>(profile_.total_length());
    const auto k = static_cast<long long>(profile_.count());
    BigCount sum = 0;
    for (long long m = 0; m < k; ++m) {
      const long long r = k - 1 - m;
      for (long long s = 0; s <= static_cast<long long>(table.max_length()); ++s) {
        const long long left = static_cast<long long>(l) - 1 - s;
        if (left < 0) break;
        const long long right = n - static_cast<long long>(l) - a + s + k - m;
        if (right < r) continue;
        const BigCount& subsets = table.at(static_cast<std::size_t>(m), static_cast<std::size_t>(s));
        if (subsets == 0) continue;
        sum += subsets * perm(static_cast<std::size_t>(m), static_cast<std::size_t>(left + m)) *
               perm(static_cast<std::size_t>(r), static_cast<std::size_t>(right));
      }
    }
    return sum;
  }

  SequenceSpec seq_;
  SegmentProfile profile_;
  BigCount total_;
  std::size_t width_ = 0;
  std::vector<BigCount> perms_;
};

/// Log-space twin of PlacementCounter for sequences too long for exact counts.
class LogPlacementCounter {
 public:
  LogPlacementCounter(const SequenceSpec& seq, const SegmentProfile& profile)
      : seq_(seq), profile_(profile) {
    detail::check_feasible(seq, profile);
    log_total_ = log_total_configurations(seq, profile);
  }

  long double log_total() const { return log_total_; }

  long double log_count(std::size_t segment, std::size_t start) const {
    detail::check_segment(profile_, segment);
    return log_count_with(BasicSubsetLengthTable<long double>(profile_, segment), start);
  }

  std::vector<long double> log_counts(std::size_t segment) const {
    detail::check_segment(profile_, segment);
    const BasicSubsetLengthTable<long double> table(profile_, segment);
    const FlatRegion flat = flat_region(seq_, profile_, segment);
    std::vector<long double> out(detail::support_size(seq_, profile_.length_of(segment)));
    std::optional<long double> flat_value;
    for (std::size_t l = 1; l <= out.size(); ++l) {
      if (flat.contains(l)) {
        if (!flat_value) flat_value = log_count_with(table, l);
        out[l - 1] = *flat_value;
      } else {
        out[l - 1] = log_count_with(table, l);
      }
    }
    return out;
  }

 private:
  long double log_count_with(const BasicSubsetLengthTable<long double>& table, std::size_t l) const {
    const auto n = static_cast<long long>(seq_.length());
    const auto a = static_cast<long long>(profile_.total_length());
    const auto k = static_cast<long long>(profile_.count());
    std::vector<long double> terms;
    for (long long m = 0; m < k; ++m) {
      const long long r = k - 1 - m;
      for (long long s = 0; s <= static_cast<long long>(table.max_length()); ++s) {
        const long long left = static_cast<long long>(l) - 1 - s;
        if (left < 0) break;
        const long long right = n - static_cast<long long>(l) - a + s + k - m;
        if (right < r) continue;
        const long double subsets = table.at(static_cast<std::size_t>(m), static_cast<std::size_t>(s));
        if (subsets == 0) continue;
        terms.push_back(std::log(subsets) +
                        log_falling_factorial(static_cast<std::size_t>(left + m), static_cast<std::size_t>(m)) +
                        log_falling_factorial(static_cast<std::size_t>(right), static_cast<std::size_t>(r)));
      }
    }
    if (terms.empty()) return kLogZero;
    const long double peak = *std::max_element(terms.begin(), terms.end());
    CompensatedSum<long double> acc;
    for (long double t : terms) acc.add(std::exp(t - peak));
    return peak + std::log(acc.value());
  }

  SequenceSpec seq_;
  SegmentProfile profile_;
  long double log_total_;
};

/// Number of configurations with segment i (1-based) starting at token l.
inline BigCount location_count(const SequenceSpec& seq, const SegmentProfile& profile,
                               std::size_t segment, std::size_t start) {
  detail::check_segment(profile, segment);
  return PlacementCounter(seq, profile).count(segment, start);
}

// Distributions -------------------------------------------------------------

enum class DistributionMode { exact, uniform_approximation, overlapping };

inline const char* to_string(DistributionMode m) {
  switch (m) {
    case DistributionMode::exact: return "exact";
    case DistributionMode::uniform_approximation: return "uniform-approximation";
    case DistributionMode::overlapping: return "overlapping";
  }
  return "?";
}

/// Marginal distribution of one segment's start index.
struct LocationDistribution {
  std::size_t segment_index = 1;  // 1-based
  std::size_t segment_length = 1;
  std::size_t sequence_length = 1;
  std::vector<double> probs;  // probs[l-1] = P(start = l), l = 1..n-a_i+1
  FlatRegion flat_region;
  DistributionMode mode = DistributionMode::exact;
  bool log_space = false;

  std::size_t support_size() const { return probs.size(); }
  double at(std::size_t start) const {
    return start >= 1 && start <= probs.size() ? probs[start - 1] : 0.0;
  }
  ComputeMode compute_mode() const {
    if (mode == DistributionMode::uniform_approximation) return ComputeMode::uniform_approximation;
    return log_space ? ComputeMode::log_space : ComputeMode::exact;
  }
};

/// Knobs shared by the distribution and agreement layers.
struct ModelOptions {
  Model model = Model::non_overlapping;
  Arithmetic arithmetic = Arithmetic::automatic;
  /// Automatic arithmetic stays exact while n - a + k <= exact_limit.
  std::size_t exact_limit = 2000;
  /// When set, segments passing uniform_approx_applicable use a uniform distribution.
  std::optional<double> approx_alpha;

  bool exact_for(const SequenceSpec& seq, const SegmentProfile& profile) const {
    switch (arithmetic) {
      case Arithmetic::exact: return true;
      case Arithmetic::log_space: return false;
      case Arithmetic::automatic: break;
    }
    return seq.length() - profile.total_length() + profile.count() <= exact_limit;
  }
};

/// True iff (n-a+k)/(n-a_i+1) > alpha.
inline bool uniform_approx_applicable(const SequenceSpec& seq, const SegmentProfile& profile,
                                      std::size_t segment, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw InvalidArgument("alpha must lie in (0, 1)");
  detail::check_segment(profile, segment);
  detail::check_feasible(seq, profile);
  const double n = static_cast<double>(seq.length());
  const double ratio = (n - static_cast<double>(profile.total_length()) + static_cast<double>(profile.count())) /
                       (n - static_cast<double>(profile.length_of(segment)) + 1.0);
  return ratio > alpha;
}

namespace detail {

inline LocationDistribution uniform_distribution(const SequenceSpec& seq, std::size_t segment,
                                                 std::size_t length, DistributionMode mode) {
  LocationDistribution d;
  d.segment_index = segment;
  d.segment_length = length;
  d.sequence_length = seq.length();
  const std::size_t support = support_size(seq, length);
  d.probs.assign(support, 1.0 / static_cast<double>(support));
  d.flat_region = {1, support};
  d.mode = mode;
  return d;
}

inline LocationDistribution from_counts(const SequenceSpec& seq, const SegmentProfile& profile,
                                        std::size_t segment, const std::vector<BigCount>& counts,
                                        const BigCount& total) {
  LocationDistribution d;
  d.segment_index = segment;
  d.segment_length = profile.length_of(segment);
  d.sequence_length = seq.length();
  d.flat_region = flat_region(seq, profile, segment);
  d.probs.reserve(counts.size());
  for (const auto& c : counts) d.probs.push_back(ratio_to_double(c, total));
  return d;
}

inline LocationDistribution from_log_counts(const SequenceSpec& seq, const SegmentProfile& profile,
                                            std::size_t segment,
                                            const std::vector<long double>& log_counts,
                                            long double log_total) {
  LocationDistribution d;
  d.segment_index = segment;
  d.segment_length = profile.length_of(segment);
  d.sequence_length = seq.length();
  d.flat_region = flat_region(seq, profile, segment);
  d.log_space = true;
  std::vector<long double> weights;
  weights.reserve(log_counts.size());
  CompensatedSum<long double> norm;
  for (long double lc : log_counts) {
    weights.push_back(std::exp(lc - log_total));
    norm.add(weights.back());
  }
  // Renormalize so the lgamma drift in log_total cannot bias the sum.
  const long double z = norm.value();
  for (long double w : weights) d.probs.push_back(static_cast<double>(w / z));
  return d;
}

}  // namespace detail

/// Exact non-overlapping distribution of segment i's start index.
inline LocationDistribution location_distribution(const SequenceSpec& seq,
                                                  const SegmentProfile& profile,
                                                  std::size_t segment) {
  detail::check_segment(profile, segment);
  const PlacementCounter counter(seq, profile);
  return detail::from_counts(seq, profile, segment, counter.counts(segment), counter.total());
}

inline LocationDistribution log_location_distribution(const SequenceSpec& seq,
                                                      const SegmentProfile& profile,
                                                      std::size_t segment) {
  detail::check_segment(profile, segment);
  const LogPlacementCounter counter(seq, profile);
  return detail::from_log_counts(seq, profile, segment, counter.log_counts(segment),
                                 counter.log_total());
}

/// Without the exclusion constraint each start is uniform on 1..n-a_i+1.
inline LocationDistribution overlapping_location_distribution(const SequenceSpec& seq,
                                                              const SegmentProfile& profile,
                                                              std::size_t segment) {
  detail::check_segment(profile, segment);
  const std::size_t len = profile.length_of(segment);
  if (len > seq.length())
    throw InfeasibleProfile("segment length " + std::to_string(len) + " exceeds sequence length " +
                            std::to_string(seq.length()));
  return detail::uniform_distribution(seq, segment, len, DistributionMode::overlapping);
}

/// Distributions of all segments under the chosen model and arithmetic.
/// Segments of equal length share one computation.
inline std::vector<LocationDistribution> location_distributions(const SequenceSpec& seq,
                                                                const SegmentProfile& profile,
                                                                const ModelOptions& options = {}) {
  std::vector<LocationDistribution> out;
  if (profile.empty()) return out;
  out.reserve(profile.count());

  if (options.model == Model::overlapping) {
    for (std::size_t i = 1; i <= profile.count(); ++i)
      out.push_back(overlapping_location_distribution(seq, profile, i));
    return out;
  }

  detail::check_feasible(seq, profile);
  const bool exact = options.exact_for(seq, profile);
  std::optional<PlacementCounter> exact_counter;
  std::optional<LogPlacementCounter> log_counter;

  for (std::size_t i = 1; i <= profile.count(); ++i) {
    const std::size_t len = profile.length_of(i);
    auto same = std::find_if(out.begin(), out.end(),
                             [&](const LocationDistribution& d) { return d.segment_length == len; });
    if (same != out.end()) {
      LocationDistribution copy = *same;
      copy.segment_index = i;
      out.push_back(std::move(copy));
      continue;
    }
    const FlatRegion flat = flat_region(seq, profile, i);
    const bool already_uniform = flat.first == 1 && flat.last == detail::support_size(seq, len);
    if (options.approx_alpha && !already_uniform &&
        uniform_approx_applicable(seq, profile, i, *options.approx_alpha)) {
      out.push_back(detail::uniform_distribution(seq, i, len, DistributionMode::uniform_approximation));
      continue;
    }
    if (exact) {
      if (!exact_counter) exact_counter.emplace(seq, profile);
      out.push_back(detail::from_counts(seq, profile, i, exact_counter->counts(i), exact_counter->total()));
    } else {
      if (!log_counter) log_counter.emplace(seq, profile);
      out.push_back(detail::from_log_counts(seq, profile, i, log_counter->log_counts(i),
                                            log_counter->log_total()));
    }
  }
  return out;
}

/// Single-segment dispatch with the same options.
inline LocationDistribution location_distribution(const SequenceSpec& seq,
                                                  const SegmentProfile& profile,
                                                  std::size_t segment, const ModelOptions& options) {
  detail::check_segment(profile, segment);
  if (options.model == Model::overlapping)
    return overlapping_location_distribution(seq, profile, segment);
  detail::check_feasible(seq, profile);
  const std::size_t len = profile.length_of(segment);
  const FlatRegion flat = flat_region(seq, profile, segment);
  const bool already_uniform = flat.first == 1 && flat.last == detail::support_size(seq, len);
  if (options.approx_alpha && !already_uniform &&
      uniform_approx_applicable(seq, profile, segment, *options.approx_alpha))
    return detail::uniform_distribution(seq, segment, len, DistributionMode::uniform_approximation);
  return options.exact_for(seq, profile) ? location_distribution(seq, profile, segment)
                                         : log_location_distribution(seq, profile, segment);
}

}  // namespace seqagree
