#pragma once

#include <algorithm>
#include <cstddef>
#include <numeric>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace seqagree {

// Errors -------------------------------------------------------------------

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Argument outside the documented domain (index out of range, bad alpha, ...).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Segments do not fit into the sequence without overlapping (a > n).
class InfeasibleProfile : public Error {
 public:
  using Error::Error;
};

/// Chance agreement equals one, so no corrected score exists.
class DegenerateChance : public Error {
 public:
  using Error::Error;
};

/// Enumeration would exceed the caller's budget.
class BudgetExceeded : public Error {
 public:
  using Error::Error;
};

// Core value types -----------------------------------------------------------

/// A token sequence of length n (n >= 1).
class SequenceSpec {
 public:
  explicit SequenceSpec(std::size_t n) : n_(n) {
    if (n == 0) throw InvalidArgument("sequence length must be positive");
  }
  std::size_t length() const { return n_; }
  friend bool operator==(const SequenceSpec&, const SequenceSpec&) = default;

 private:
  std::size_t n_;
};

/// The segment lengths one annotator produced on one sequence. Segments are
/// distinguishable: order matters only for identifying segment i.
class SegmentProfile {
 public:
  SegmentProfile() = default;
  explicit SegmentProfile(std::vector<std::size_t> lengths)
      : lengths_(std::move(lengths)) {
    for (auto len : lengths_)
      if (len == 0) throw InvalidArgument("segment lengths must be positive");
    total_ = std::accumulate(lengths_.begin(), lengths_.end(), std::size_t{0});
  }
  SegmentProfile(std::initializer_list<std::size_t> lengths)
      : SegmentProfile(std::vector<std::size_t>(lengths)) {}

  const std::vector<std::size_t>& lengths() const { return lengths_; }
  std::size_t count() const { return lengths_.size(); }
  std::size_t total_length() const { return total_; }
  bool empty() const { return lengths_.empty(); }
  /// 1-based access, matching segment numbering elsewhere.
  std::size_t length_of(std::size_t segment) const {
    if (segment == 0 || segment > lengths_.size())
      throw InvalidArgument("segment index out of range");
    return lengths_[segment - 1];
  }
  bool fits(const SequenceSpec& seq) const { return total_ <= seq.length(); }

  friend bool operator==(const SegmentProfile&, const SegmentProfile&) = default;

 private:
  std::vector<std::size_t> lengths_;
  std::size_t total_ = 0;
};

/// One contiguous span; start is a 1-based token index.
struct Span {
  std::size_t start = 1;
  std::size_t length = 1;

  std::size_t end() const { return start + length; }  // one past the last token
  friend bool operator==(const Span&, const Span&) = default;
  friend auto operator<=>(const Span&, const Span&) = default;
};

/// Sorted, non-overlapping spans on one sequence.
class PlacedAnnotation {
 public:
  PlacedAnnotation() = default;
  explicit PlacedAnnotation(std::vector<Span> spans) : spans_(std::move(spans)) {
    std::sort(spans_.begin(), spans_.end());
    for (std::size_t j = 0; j < spans_.size(); ++j) {
      if (spans_[j].start == 0 || spans_[j].length == 0)
        throw InvalidArgument("spans need a 1-based start and positive length");
      if (j > 0 && spans_[j].start < spans_[j - 1].end())
        throw InvalidArgument("spans overlap");
    }
  }
  PlacedAnnotation(std::initializer_list<Span> spans)
      : PlacedAnnotation(std::vector<Span>(spans)) {}

  const std::vector<Span>& spans() const { return spans_; }
  bool empty() const { return spans_.empty(); }
  std::size_t covered() const {
    std::size_t total = 0;
    for (const auto& s : spans_) total += s.length;
    return total;
  }
  /// Last covered token (0 when empty).
  std::size_t last_token() const {
    return spans_.empty() ? 0 : spans_.back().end() - 1;
  }
  void check_within(const SequenceSpec& seq) const {
    if (last_token() > seq.length())
      throw InvalidArgument("span exceeds sequence length " +
                            std::to_string(seq.length()));
  }
  /// Profile with lengths in span order.
  SegmentProfile profile() const {
    std::vector<std::size_t> lengths;
    lengths.reserve(spans_.size());
    for (const auto& s : spans_) lengths.push_back(s.length);
    return SegmentProfile(std::move(lengths));
  }
  /// 0/1 coverage mask over tokens 1..n (index 0 is token 1).
  std::vector<char> mask(const SequenceSpec& seq) const {
    check_within(seq);
    std::vector<char> m(seq.length(), 0);
    for (const auto& s : spans_)
      std::fill_n(m.begin() + static_cast<std::ptrdiff_t>(s.start - 1), s.length, 1);
    return m;
  }

  friend bool operator==(const PlacedAnnotation&, const PlacedAnnotation&) = default;

 private:
  std::vector<Span> spans_;
};

// Computation metadata --------------------------------------------------------

enum class Model { non_overlapping, overlapping };

enum class Arithmetic { automatic, exact, log_space };

/// How a value was obtained; ordered from most to least exact.
enum class ComputeMode { exact, log_space, uniform_approximation, monte_carlo };

inline ComputeMode coarser(ComputeMode a, ComputeMode b) { return std::max(a, b); }

inline const char* to_string(Model m) {
  return m == Model::overlapping ? "overlapping" : "non-overlapping";
}

inline const char* to_string(ComputeMode m) {
  switch (m) {
    case ComputeMode::exact: return "exact";
    case ComputeMode::log_space: return "log-space";
    case ComputeMode::uniform_approximation: return "uniform-approximation";
    case ComputeMode::monte_carlo: return "monte-carlo";
  }
  return "?";
}

inline const char* to_string(Arithmetic a) {
  switch (a) {
    case Arithmetic::automatic: return "auto";
    case Arithmetic::exact: return "exact";
    case Arithmetic::log_space: return "log";
  }
  return "?";
}

inline Model parse_model(const std::string& s) {
  if (s == "overlap" || s == "overlapping") return Model::overlapping;
  if (s == "nooverlap" || s == "non-overlapping") return Model::non_overlapping;
  throw InvalidArgument("unknown model '" + s + "'");
}

inline ComputeMode parse_compute_mode(const std::string& s) {
  for (auto m : {ComputeMode::exact, ComputeMode::log_space,
                 ComputeMode::uniform_approximation, ComputeMode::monte_carlo})
    if (s == to_string(m)) return m;
  throw InvalidArgument("unknown mode '" + s + "'");
}

}  // namespace seqagree
