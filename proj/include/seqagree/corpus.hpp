#pragma once

// Micro-averaged corpus evaluation: every (sentence, entity type) cell
// contributes its shared token count, both annotated lengths and the expected
// shared count under the random model; F1 ratios are formed from the pooled
// sums.

#include <algorithm>
#include <chrono>
#include <exception>
#include <cstddef>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include "agreement.hpp"
#include "conll.hpp"
#include "types.hpp"

namespace seqagree {

class AlignmentError : public Error {
 public:
  AlignmentError(std::size_t sentence, const std::string& what)
      : Error("sentence " + std::to_string(sentence) + ": " + what), sentence_(sentence) {}
  std::size_t sentence() const { return sentence_; }

 private:
  std::size_t sentence_;
};

struct CorpusOptions {
  ModelOptions model;
  /// Worker threads; 0 means one per hardware thread.
  std::size_t jobs = 0;
};

/// Pooled counts for one scope.
struct AggregateStats {
  std::size_t intersection = 0;
  std::size_t gold_length = 0;
  std::size_t system_length = 0;
  double expected_intersection = 0.0;
  double gold_self_expected = 0.0;  // E[a] of gold against a second randomization of itself

  AggregateStats& operator+=(const AggregateStats& o) {
    intersection += o.intersection;
    gold_length += o.gold_length;
    system_length += o.system_length;
    expected_intersection += o.expected_intersection;
    gold_self_expected += o.gold_self_expected;
    return *this;
  }

  double observed_f1() const {
    const std::size_t total = gold_length + system_length;
    return total == 0 ? 1.0 : 2.0 * static_cast<double>(intersection) / static_cast<double>(total);
  }
  double chance_f1() const {
    const std::size_t total = gold_length + system_length;
    return total == 0 ? 1.0 : 2.0 * expected_intersection / static_cast<double>(total);
  }
  /// Pooled gold self-chance; 1 when there is no gold annotation.
  double gold_chance_level() const {
    return gold_length == 0 ? 1.0 : gold_self_expected / static_cast<double>(gold_length);
  }
  Scores scores() const { return make_scores(observed_f1(), chance_f1(), 1.0 - gold_chance_level()); }
};

/// One (sentence, type) cell.
struct CellStats {
  std::string type;
  AggregateStats stats;
  ComputeMode mode = ComputeMode::exact;
};

/// Flat view of all sentences in document order; ids are 0-based positions.
inline std::vector<const Sentence*> flatten(const std::vector<CorpusDocument>& corpus) {
  std::vector<const Sentence*> out;
  for (const auto& d : corpus)
    for (const auto& s : d.sentences) out.push_back(&s);
  return out;
}

/// Run fn(i) for i in [0, count) on up to `jobs` threads. Each index is
/// handled exactly once; callers write results into per-index slots.
template <typename Fn>
void parallel_for(std::size_t count, std::size_t jobs, Fn&& fn) {
  if (jobs == 0) jobs = std::max(1u, std::thread::hardware_concurrency());
  jobs = std::min(jobs, std::max<std::size_t>(count, 1));
  if (jobs <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::vector<std::exception_ptr> errors(jobs);
  std::vector<std::thread> workers;
  for (std::size_t w = 0; w < jobs; ++w)
    workers.emplace_back([&, w] {
      try {
        for (std::size_t i = w; i < count; i += jobs) fn(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  for (auto& t : workers) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

/// Per-type cells for one aligned sentence pair. Types with no span on
/// either side are skipped.
inline std::vector<CellStats> sentence_cells(const Sentence& gold, const Sentence& system,
                                             const ModelOptions& options) {
  std::set<std::string> types;
  for (const auto& [t, ann] : gold.typed_spans)
    if (!ann.empty()) types.insert(t);
  for (const auto& [t, ann] : system.typed_spans)
    if (!ann.empty()) types.insert(t);
  const SequenceSpec seq = gold.sequence();
  std::vector<CellStats> cells;
  for (const auto& type : types) {
    const auto& g = gold.spans_of(type);
    const auto& s = system.spans_of(type);
    const auto gc = profile_coverage(seq, g.profile(), options);
    const auto sc = profile_coverage(seq, s.profile(), options);
    CellStats cell;
    cell.type = type;
    cell.stats.intersection = intersection_size(g, s);
    cell.stats.gold_length = g.covered();
    cell.stats.system_length = s.covered();
    cell.stats.expected_intersection = expected_intersection(gc, sc);
    cell.stats.gold_self_expected = expected_intersection(gc, gc);
    cell.mode = coarser(gc.mode, sc.mode);
    cells.push_back(std::move(cell));
  }
  return cells;
}

inline void check_aligned(const std::vector<const Sentence*>& gold,
                          const std::vector<const Sentence*>& system) {
  for (std::size_t i = 0; i < std::min(gold.size(), system.size()); ++i)
    if (gold[i]->tokens.size() != system[i]->tokens.size())
      throw AlignmentError(i, "gold has " + std::to_string(gold[i]->tokens.size()) +
                                  " tokens, system has " + std::to_string(system[i]->tokens.size()));
  if (gold.size() != system.size())
    throw AlignmentError(std::min(gold.size(), system.size()),
                         "gold has " + std::to_string(gold.size()) + " sentences, system has " +
                             std::to_string(system.size()));
}

/// Per-sentence cells for all (or the selected) sentences.
inline std::vector<std::vector<CellStats>> corpus_cells(const std::vector<CorpusDocument>& gold,
                                                        const std::vector<CorpusDocument>& system,
                                                        const CorpusOptions& options) {
  const auto g = flatten(gold);
  const auto s = flatten(system);
  check_aligned(g, s);
  std::vector<std::vector<CellStats>> cells(g.size());
  parallel_for(g.size(), options.jobs,
               [&](std::size_t i) { cells[i] = sentence_cells(*g[i], *s[i], options.model); });
  return cells;
}

/// Pool precomputed cells into a report, optionally restricted to a subset of sentence ids.
inline AgreementReport report_from_cells(const std::vector<std::vector<CellStats>>& cells,
                                         const ModelOptions& options,
                                         const std::vector<std::size_t>* subset = nullptr) {
  AgreementReport report;
  report.model = options.model;
  AggregateStats overall;
  std::map<std::string, AggregateStats> by_type;
  auto take = [&](std::size_t i) {
    for (const auto& c : cells.at(i)) {
      overall += c.stats;
      by_type[c.type] += c.stats;
      report.mode = coarser(report.mode, c.mode);
    }
  };
  if (subset)
    for (auto i : *subset) take(i);
  else
    for (std::size_t i = 0; i < cells.size(); ++i) take(i);
  report.set_scores(overall.scores());
  for (const auto& [type, stats] : by_type) report.per_type.emplace(type, stats.scores());
  return report;
}

inline AgreementReport micro_average_report(const std::vector<CorpusDocument>& gold,
                                            const std::vector<CorpusDocument>& system,
                                            const CorpusOptions& options = {}) {
  const auto started = std::chrono::steady_clock::now();
  auto report = report_from_cells(corpus_cells(gold, system, options), options.model);
  report.runtime_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return report;
}

/// Pooled self-chance of a sentence's gold annotation across entity types;
/// 1 for a sentence without entities.
inline double sentence_chance_level(const Sentence& gold, const ModelOptions& options = {}) {
  AggregateStats pooled;
  for (const auto& cell : sentence_cells(gold, gold, options)) pooled += cell.stats;
  return pooled.gold_chance_level();
}

struct Partition {
  std::vector<std::size_t> subset1;  // chance level > threshold (easier)
  std::vector<std::size_t> subset2;  // chance level <= threshold
  std::vector<double> chance_levels;
  double threshold = 0.825;
};

inline constexpr double kDefaultPartitionThreshold = 0.825;

inline Partition partition_by_difficulty(const std::vector<CorpusDocument>& gold,
                                         double threshold = kDefaultPartitionThreshold,
                                         const CorpusOptions& options = {}) {
  const auto sentences = flatten(gold);
  Partition p;
  p.threshold = threshold;
  p.chance_levels.resize(sentences.size());
  parallel_for(sentences.size(), options.jobs, [&](std::size_t i) {
    p.chance_levels[i] = sentence_chance_level(*sentences[i], options.model);
  });
  for (std::size_t i = 0; i < sentences.size(); ++i)
    (p.chance_levels[i] > threshold ? p.subset1 : p.subset2).push_back(i);
  return p;
}

/// 1-based ranks, best (highest) score first; ties keep input order.
inline std::vector<std::size_t> rank_descending(const std::vector<double>& scores) {
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) { return scores[x] > scores[y]; });
  std::vector<std::size_t> rank(scores.size());
  for (std::size_t r = 0; r < order.size(); ++r) rank[order[r]] = r + 1;
  return rank;
}

/// Indices whose rank differs between the two rankings.
inline std::vector<std::size_t> rank_changes(const std::vector<std::size_t>& before,
                                             const std::vector<std::size_t>& after) {
  if (before.size() != after.size()) throw InvalidArgument("rankings differ in size");
  std::vector<std::size_t> changed;
  for (std::size_t i = 0; i < before.size(); ++i)
    if (before[i] != after[i]) changed.push_back(i);
  return changed;
}

}  // namespace seqagree
