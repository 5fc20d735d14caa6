// seqagree: chance-corrected agreement for span annotations.
//
//   seqagree distribution -n 100 -l 1,5,10,15 -i 1
//   seqagree agree -n 20 --spans1 4:2,9:3,15:4 --spans2 3:3,9:4,15:5
//   seqagree agree --gold gold.conll --system system.conll --format csv
//   seqagree difficulty -n 20 -l 2,3,4
//   seqagree partition --gold gold.conll --system a.conll --system b.conll
//   seqagree validate -n 12 --l1 2,3 --l2 3 --samples 100000 --seed 1
//
// Exit codes: 0 success, 1 usage error, 2 data error, 3 validation mismatch.

#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#if __has_include(<CLI11.hpp>)
#include <CLI11.hpp>
#else
#include <CLI/CLI.hpp>
#endif
#include <nlohmann/json.hpp>

#include "seqagree/seqagree.hpp"

namespace {

using namespace seqagree;
using Json = nlohmann::ordered_json;

constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitMismatch = 3;
constexpr double kValidationTolerance = 1e-9;

class DataError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

class UsageError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  std::string command;
  std::string model = "nooverlap";
  double alpha = 0.99;
  bool exact = false;
  bool log = false;
  std::size_t exact_limit = 2000;
  std::uint64_t samples = 100000;
  std::uint64_t seed = 1;
  std::string format = "json";
  std::size_t jobs = 0;
  bool no_timing = false;

  // command inputs
  std::size_t n = 0;
  std::vector<std::vector<std::size_t>> lengths;
  std::vector<std::size_t> l1, l2;
  std::size_t segment = 0;
  std::string spans1, spans2;
  std::string gold;
  std::vector<std::string> systems;
  double threshold = kDefaultPartitionThreshold;
  std::uint64_t budget = kDefaultEnumerationBudget;
  std::string scheme = "auto";
  bool strict = false;
  bool fixed_gold = false;

  Arithmetic arithmetic() const {
    if (exact) return Arithmetic::exact;
    if (log) return Arithmetic::log_space;
    return Arithmetic::automatic;
  }

  ModelOptions model_options() const {
    ModelOptions o;
    o.model = parse_model(model);
    o.arithmetic = arithmetic();
    o.exact_limit = exact_limit;
    if (!(alpha > 0.0)) throw UsageError("--alpha must lie in (0, 1]");
    if (alpha < 1.0) o.approx_alpha = alpha;
    return o;
  }

  std::size_t resolved_jobs() const {
    return jobs ? jobs : std::max(1u, std::thread::hardware_concurrency());
  }

  ReportFormat report_format() const { return parse_report_format(format); }

  Json to_json() const {
    Json j;
    j["command"] = command;
    j["model"] = to_string(parse_model(model));
    j["alpha"] = alpha;
    j["arithmetic"] = exact ? "exact" : log ? "log" : "auto";
    j["exact_limit"] = exact_limit;
    j["format"] = format;
    j["jobs"] = resolved_jobs();
    if (command == "distribution" || command == "difficulty" || command == "validate" ||
        (command == "agree" && gold.empty()))
      if (n) j["n"] = n;
    if (lengths.size() == 1)
      j["lengths"] = lengths.front();
    else if (!lengths.empty())
      j["lengths"] = lengths;
    if (command == "distribution" && segment) j["segment"] = segment;
    if (command == "validate") {
      j["l1"] = l1;
      j["l2"] = l2;
      j["samples"] = samples;
      j["seed"] = seed;
      j["budget"] = budget;
    }
    if (command == "agree" && gold.empty()) {
      j["spans1"] = spans1;
      j["spans2"] = spans2;
      j["fixed_gold"] = fixed_gold;
    }
    if (!gold.empty()) {
      j["gold"] = gold;
      j["scheme"] = scheme;
      j["strict"] = strict;
    }
    if (!systems.empty()) j["system"] = command == "agree" ? Json(systems.front()) : Json(systems);
    if (command == "partition") j["threshold"] = threshold;
    return j;
  }
};

// Helpers ---------------------------------------------------------------------

std::string fixed6(double v) { return format_fixed(v); }

Json optional_json(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

double elapsed_since(std::chrono::steady_clock::time_point t0, const RunConfig& cfg) {
  if (cfg.no_timing) return 0.0;
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

/// "start:length,start:length" with 1-based starts; the empty string is no spans.
PlacedAnnotation parse_spans(const std::string& text, const char* flag) {
  std::vector<Span> spans;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t comma = text.find(',', pos);
    if (comma == std::string::npos) comma = text.size();
    const std::string item = text.substr(pos, comma - pos);
    const auto colon = item.find(':');
    Span s{};
    const char* b = item.data();
    const char* e = b + item.size();
    if (colon == std::string::npos ||
        std::from_chars(b, b + colon, s.start).ptr != b + colon ||
        std::from_chars(b + colon + 1, e, s.length).ptr != e)
      throw UsageError(std::string(flag) + ": expected start:length, got '" + item + "'");
    spans.push_back(s);
    pos = comma + 1;
  }
  try {
    return PlacedAnnotation(std::move(spans));
  } catch (const InvalidArgument& e) {
    throw UsageError(std::string(flag) + ": " + e.what());
  }
}

std::vector<CorpusDocument> load_corpus(const std::string& path, const RunConfig& cfg) {
  ParseOptions opts;
  opts.strict = cfg.strict;
  if (cfg.scheme == "iob1")
    opts.scheme = TagScheme::iob1;
  else if (cfg.scheme == "iob2")
    opts.scheme = TagScheme::iob2;
  std::ifstream file;
  std::istream* in = &std::cin;
  if (path != "-") {
    file.open(path);
    if (!file) throw DataError(path + ": cannot open");
    in = &file;
  }
  try {
    auto result = parse_conll(*in, opts);
    for (const auto& w : result.warnings) std::cerr << "seqagree: warning: " << path << ": " << w << '\n';
    return std::move(result.documents);
  } catch (const ParseError& e) {
    throw DataError(path + ": " + e.what());
  }
}

void check_single_stdin(const RunConfig& cfg) {
  int stdin_inputs = cfg.gold == "-";
  for (const auto& s : cfg.systems) stdin_inputs += s == "-";
  if (stdin_inputs > 1) throw UsageError("only one input may be read from standard input");
}

void write_config_csv(std::ostream& out, const Json& config) {
  for (const auto& [key, value] : config.items())
    out << "# " << key << '=' << (value.is_string() ? value.get<std::string>() : value.dump()) << '\n';
}

void write_json(std::ostream& out, Json body, const RunConfig& cfg) {
  body["config"] = cfg.to_json();
  out << body.dump(2) << '\n';
}

// Commands --------------------------------------------------------------------

int cmd_distribution(const RunConfig& cfg) {
  const auto t0 = std::chrono::steady_clock::now();
  const SequenceSpec seq(cfg.n);
  const SegmentProfile profile(cfg.lengths.at(0));
  const auto opts = cfg.model_options();
  std::vector<LocationDistribution> dists;
  if (cfg.segment) {
    dists.push_back(location_distribution(seq, profile, cfg.segment, opts));
  } else {
    dists = location_distributions(seq, profile, opts);
  }
  const double runtime = elapsed_since(t0, cfg);

  if (cfg.report_format() == ReportFormat::csv) {
    write_config_csv(std::cout, cfg.to_json());
    std::cout << "segment,length,location,probability,flat,mode\n";
    char buf[64];
    for (const auto& d : dists)
      for (std::size_t l = 1; l <= d.support_size(); ++l) {
        std::snprintf(buf, sizeof buf, "%.10g", d.at(l));
        std::cout << d.segment_index << ',' << d.segment_length << ',' << l << ',' << buf << ','
                  << (d.flat_region.contains(l) ? 1 : 0) << ',' << to_string(d.compute_mode()) << '\n';
      }
    std::cout << "# runtime_seconds=" << fixed6(runtime) << '\n';
    return 0;
  }
  Json segments = Json::array();
  for (const auto& d : dists) {
    Json s;
    s["segment"] = d.segment_index;
    s["length"] = d.segment_length;
    s["support"] = {1, d.support_size()};
    s["flat_region"] = d.flat_region.empty() ? Json(nullptr) : Json{d.flat_region.first, d.flat_region.last};
    s["mode"] = to_string(d.compute_mode());
    s["probabilities"] = d.probs;
    segments.push_back(std::move(s));
  }
  Json body;
  body["segments"] = std::move(segments);
  body["runtime_seconds"] = runtime;
  write_json(std::cout, std::move(body), cfg);
  return 0;
}

void emit_with_config(const AgreementReport& report, const RunConfig& cfg) {
  const auto format = cfg.report_format();
  if (format == ReportFormat::csv) {
    write_config_csv(std::cout, cfg.to_json());
    emit_report(report, format, std::cout);
    return;
  }
  write_report_json_body(report, std::cout);
  std::string config = cfg.to_json().dump(2);
  for (std::size_t p = 0; (p = config.find('\n', p)) != std::string::npos; p += 3) config.replace(p, 1, "\n  ");
  std::cout << ",\n  \"config\": " << config << "\n}\n";
}

int cmd_agree(const RunConfig& cfg) {
  const auto t0 = std::chrono::steady_clock::now();
  const auto opts = cfg.model_options();
  const bool files = !cfg.gold.empty() || !cfg.systems.empty();
  AgreementReport report;
  if (files) {
    if (cfg.gold.empty() || cfg.systems.size() != 1) throw UsageError("agree needs both --gold and --system");
    if (cfg.fixed_gold) throw UsageError("--fixed-gold applies to inline spans only");
    check_single_stdin(cfg);
    const auto gold = load_corpus(cfg.gold, cfg);
    const auto system = load_corpus(cfg.systems.front(), cfg);
    CorpusOptions copts;
    copts.model = opts;
    copts.jobs = cfg.jobs;
    try {
      report = micro_average_report(gold, system, copts);
    } catch (const AlignmentError& e) {
      throw DataError(cfg.gold + " vs " + cfg.systems.front() + ": " + e.what());
    }
  } else {
    if (!cfg.n) throw UsageError("agree needs -n with --spans1/--spans2, or --gold/--system");
    const SequenceSpec seq(cfg.n);
    const auto first = parse_spans(cfg.spans1, "--spans1");
    const auto second = parse_spans(cfg.spans2, "--spans2");
    try {
      first.check_within(seq);
      second.check_within(seq);
    } catch (const InvalidArgument& e) {
      throw DataError(e.what());
    }
    report = agree(seq, first, second, opts, cfg.fixed_gold);
  }
  report.runtime_seconds = elapsed_since(t0, cfg);
  emit_with_config(report, cfg);
  return 0;
}

int cmd_difficulty(const RunConfig& cfg) {
  const auto t0 = std::chrono::steady_clock::now();
  const auto opts = cfg.model_options();
  double value = 0.0;
  std::size_t units = 0;
  if (!cfg.gold.empty()) {
    if (!cfg.lengths.empty()) throw UsageError("give either --gold or -l, not both");
    const auto gold = load_corpus(cfg.gold, cfg);
    const auto sentences = flatten(gold);
    std::vector<AggregateStats> per(sentences.size());
    parallel_for(sentences.size(), cfg.jobs, [&](std::size_t i) {
      for (const auto& c : sentence_cells(*sentences[i], *sentences[i], opts)) per[i] += c.stats;
    });
    AggregateStats pooled;
    for (const auto& s : per) pooled += s;
    value = 1.0 - pooled.gold_chance_level();
    units = sentences.size();
  } else {
    if (!cfg.n || cfg.lengths.empty()) throw UsageError("difficulty needs -n and at least one -l, or --gold");
    std::vector<SegmentProfile> profiles(cfg.lengths.begin(), cfg.lengths.end());
    value = difficulty(SequenceSpec(cfg.n), profiles, opts);
    units = profiles.size();
  }
  const double runtime = elapsed_since(t0, cfg);
  const char* unit_name = cfg.gold.empty() ? "profiles" : "sentences";
  if (cfg.report_format() == ReportFormat::csv) {
    write_config_csv(std::cout, cfg.to_json());
    std::cout << "difficulty," << unit_name << ",runtime_seconds\n"
              << fixed6(value) << ',' << units << ',' << fixed6(runtime) << '\n';
    return 0;
  }
  Json body;
  body["difficulty"] = value;
  body[unit_name] = units;
  body["runtime_seconds"] = runtime;
  write_json(std::cout, std::move(body), cfg);
  return 0;
}

Json scores_json(const Scores& s) {
  Json j;
  j["observed_f1"] = s.observed_f1;
  j["chance_f1"] = s.chance_f1;
  j["corrected_f1"] = optional_json(s.corrected_f1);
  return j;
}

int cmd_partition(const RunConfig& cfg) {
  if (cfg.gold.empty()) throw UsageError("partition needs --gold");
  if (!(cfg.threshold >= 0.0 && cfg.threshold <= 1.0)) throw UsageError("--threshold must lie in [0, 1]");
  check_single_stdin(cfg);
  const auto t0 = std::chrono::steady_clock::now();
  const auto opts = cfg.model_options();
  CorpusOptions copts;
  copts.model = opts;
  copts.jobs = cfg.jobs;
  const auto gold = load_corpus(cfg.gold, cfg);
  const auto part = partition_by_difficulty(gold, cfg.threshold, copts);

  // Per-system scores on each subset, and whether the corrected-F1 ranking
  // differs between the subsets.
  Json systems = Json::array();
  std::vector<double> corrected1, corrected2;
  for (const auto& path : cfg.systems) {
    const auto system = load_corpus(path, cfg);
    std::vector<std::vector<CellStats>> cells;
    try {
      cells = corpus_cells(gold, system, copts);
    } catch (const AlignmentError& e) {
      throw DataError(cfg.gold + " vs " + path + ": " + e.what());
    }
    const auto all = report_from_cells(cells, opts);
    const auto s1 = report_from_cells(cells, opts, &part.subset1);
    const auto s2 = report_from_cells(cells, opts, &part.subset2);
    Json j;
    j["system"] = path;
    j["overall"] = scores_json(all.scores());
    j["subset1"] = scores_json(s1.scores());
    j["subset2"] = scores_json(s2.scores());
    systems.push_back(std::move(j));
    corrected1.push_back(s1.corrected_f1.value_or(NAN));
    corrected2.push_back(s2.corrected_f1.value_or(NAN));
  }
  const auto rank1 = rank_descending(corrected1);
  const auto rank2 = rank_descending(corrected2);
  const auto changed = rank_changes(rank1, rank2);
  const double runtime = elapsed_since(t0, cfg);
  const auto sentences = flatten(gold);

  if (cfg.report_format() == ReportFormat::csv) {
    write_config_csv(std::cout, cfg.to_json());
    std::cout << "sentence,document,line,tokens,chance_level,subset\n";
    std::size_t id = 0;
    for (const auto& doc : gold)
      for (const auto& s : doc.sentences) {
        std::cout << id << ',' << doc.id << ',' << s.first_line << ',' << s.tokens.size() << ','
                  << fixed6(part.chance_levels[id]) << ','
                  << (part.chance_levels[id] > cfg.threshold ? "subset1" : "subset2") << '\n';
        ++id;
      }
    return 0;
  }
  Json body;
  body["sentences"] = sentences.size();
  body["threshold"] = cfg.threshold;
  body["subset1"] = {{"count", part.subset1.size()}, {"ids", part.subset1}};
  body["subset2"] = {{"count", part.subset2.size()}, {"ids", part.subset2}};
  if (!cfg.systems.empty()) {
    body["systems"] = std::move(systems);
    body["corrected_rank_subset1"] = rank1;
    body["corrected_rank_subset2"] = rank2;
    body["reranked"] = !changed.empty();
  }
  body["runtime_seconds"] = runtime;
  write_json(std::cout, std::move(body), cfg);
  return 0;
}

int cmd_validate(const RunConfig& cfg) {
  if (parse_model(cfg.model) != Model::non_overlapping)
    throw UsageError("validate enumerates non-overlapping configurations; drop --model overlap");
  const SequenceSpec seq(cfg.n);
  const SegmentProfile p1(cfg.l1), p2(cfg.l2);
  const double analytic = chance_f1(seq, p1, p2, cfg.model_options());
  double enumerated = 0.0;
  try {
    enumerated = exact_expected_f1(seq, p1, p2, cfg.budget);
  } catch (const BudgetExceeded& e) {
    throw DataError(std::string(e.what()) + "; raise --budget or shrink the instance");
  }
  const auto mc = mc_expected_f1(seq, p1, p2, cfg.samples, cfg.seed);
  const double diff_enum = std::fabs(analytic - enumerated);
  const double diff_mc = std::fabs(analytic - mc.mean);
  const bool ok = diff_enum <= kValidationTolerance;

  if (cfg.report_format() == ReportFormat::csv) {
    write_config_csv(std::cout, cfg.to_json());
    char buf[256];
    std::snprintf(buf, sizeof buf, "%.12f,%.12f,%.12f,%.12f,%.3e,%.3e,%s\n", analytic, enumerated, mc.mean,
                  mc.standard_error, diff_enum, diff_mc, ok ? "match" : "mismatch");
    std::cout << "analytic,enumerated,monte_carlo,mc_standard_error,abs_diff_enumerated,abs_diff_monte_carlo,status\n"
              << buf;
  } else {
    Json body;
    body["analytic"] = analytic;
    body["enumerated"] = enumerated;
    body["monte_carlo"] = mc.mean;
    body["mc_standard_error"] = mc.standard_error;
    body["mc_algorithm"] = mc.algorithm;
    body["abs_diff_enumerated"] = diff_enum;
    body["abs_diff_monte_carlo"] = diff_mc;
    body["status"] = ok ? "match" : "mismatch";
    write_json(std::cout, std::move(body), cfg);
  }
  if (!ok) std::cerr << "seqagree: analytic and enumerated values differ by " << diff_enum << '\n';
  return ok ? 0 : kExitMismatch;
}

// Option wiring -----------------------------------------------------------------

void add_model_options(CLI::App* cmd, RunConfig& cfg) {
  cmd->add_option("--model", cfg.model, "overlap or nooverlap")
      ->check(CLI::IsMember({"overlap", "overlapping", "nooverlap", "non-overlapping"}))
      ->capture_default_str();
  cmd->add_option("--alpha", cfg.alpha, "uniform approximation threshold; 1 disables it")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  auto* exact = cmd->add_flag("--exact", cfg.exact, "exact integer arithmetic");
  auto* log = cmd->add_flag("--log", cfg.log, "log-space arithmetic");
  exact->excludes(log);
  cmd->add_option("--exact-limit", cfg.exact_limit, "automatic arithmetic stays exact while n-a+k is at most this")
      ->capture_default_str();
  cmd->add_option("--format", cfg.format, "json or csv")->check(CLI::IsMember({"json", "csv"}))->capture_default_str();
  cmd->add_flag("--no-timing", cfg.no_timing, "report zero runtime for reproducible output");
}

void add_corpus_options(CLI::App* cmd, RunConfig& cfg) {
  cmd->add_option("--scheme", cfg.scheme, "tag scheme: auto, iob1 or iob2")
      ->check(CLI::IsMember({"auto", "iob1", "iob2"}))
      ->capture_default_str();
  cmd->add_flag("--strict", cfg.strict, "reject dangling I- tags instead of repairing them");
  cmd->add_option("--jobs", cfg.jobs, "worker threads; 0 uses every core")->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Chance-corrected agreement for span annotations"};
  app.require_subcommand(1);
  RunConfig cfg;

  auto* dist = app.add_subcommand("distribution", "placement distribution of random segments");
  dist->add_option("-n", cfg.n, "sequence length")->required()->check(CLI::PositiveNumber);
  dist->add_option("-l", cfg.lengths, "segment lengths, comma separated")->required()->delimiter(',')->expected(1);
  dist->add_option("-i", cfg.segment, "1-based segment index; all segments when omitted")->check(CLI::PositiveNumber);
  add_model_options(dist, cfg);

  auto* agree_cmd = app.add_subcommand("agree", "observed, chance and corrected F1");
  agree_cmd->add_option("-n", cfg.n, "sequence length for inline spans")->check(CLI::PositiveNumber);
  agree_cmd->add_option("--spans1", cfg.spans1, "first annotation as start:length,...");
  agree_cmd->add_option("--spans2", cfg.spans2, "second annotation as start:length,...");
  agree_cmd->add_flag("--fixed-gold", cfg.fixed_gold, "difficulty against the placed first annotation");
  agree_cmd->add_option("--gold", cfg.gold, "gold CoNLL file, - for stdin");
  agree_cmd->add_option("--system", cfg.systems, "system CoNLL file, - for stdin")->expected(1);
  add_model_options(agree_cmd, cfg);
  add_corpus_options(agree_cmd, cfg);

  auto* diff = app.add_subcommand("difficulty", "one minus average pairwise chance F1");
  diff->add_option("-n", cfg.n, "sequence length")->check(CLI::PositiveNumber);
  diff->add_option("-l", cfg.lengths, "segment lengths of one annotator; repeat for more")
      ->delimiter(',')
      ->allow_extra_args(false)
      ->expected(1)
      ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
  diff->add_option("--gold", cfg.gold, "gold CoNLL file; pooled over sentences and types");
  add_model_options(diff, cfg);
  add_corpus_options(diff, cfg);

  auto* part = app.add_subcommand("partition", "split sentences by gold chance level");
  part->add_option("--gold", cfg.gold, "gold CoNLL file, - for stdin")->required();
  part->add_option("--system", cfg.systems, "system CoNLL file to score per subset; repeatable");
  part->add_option("--threshold", cfg.threshold, "chance level separating the subsets")->capture_default_str();
  add_model_options(part, cfg);
  add_corpus_options(part, cfg);

  auto* val = app.add_subcommand("validate", "analytic vs enumerated vs Monte Carlo chance F1");
  val->add_option("-n", cfg.n, "sequence length")->required()->check(CLI::PositiveNumber);
  val->add_option("--l1", cfg.l1, "first profile lengths")->required()->delimiter(',');
  val->add_option("--l2", cfg.l2, "second profile lengths")->required()->delimiter(',');
  val->add_option("--samples", cfg.samples, "Monte Carlo samples")->check(CLI::Range(2ull, ~0ull))->capture_default_str();
  val->add_option("--seed", cfg.seed, "Monte Carlo seed")->capture_default_str();
  val->add_option("--budget", cfg.budget, "largest configuration-pair count to enumerate")->capture_default_str();
  add_model_options(val, cfg);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (dist->parsed()) {
      cfg.command = "distribution";
      return cmd_distribution(cfg);
    }
    if (agree_cmd->parsed()) {
      cfg.command = "agree";
      return cmd_agree(cfg);
    }
    if (diff->parsed()) {
      cfg.command = "difficulty";
      return cmd_difficulty(cfg);
    }
    if (part->parsed()) {
      cfg.command = "partition";
      return cmd_partition(cfg);
    }
    cfg.command = "validate";
    return cmd_validate(cfg);
  } catch (const UsageError& e) {
    std::cerr << "seqagree: " << e.what() << '\n';
    return kExitUsage;
  } catch (const InvalidArgument& e) {
    std::cerr << "seqagree: " << e.what() << '\n';
    return kExitUsage;
  } catch (const DataError& e) {
    std::cerr << "seqagree: " << e.what() << '\n';
    return kExitData;
  } catch (const Error& e) {
    std::cerr << "seqagree: " << e.what() << '\n';
    return kExitData;
  } catch (const std::exception& e) {
    std::cerr << "seqagree: " << e.what() << '\n';
    return kExitData;
  }
}
