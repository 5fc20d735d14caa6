#include <gtest/gtest.h>

#include <sstream>

#include "support.hpp"

using namespace seqagree;
namespace fx = seqagree::testing;

namespace {

ParseResult parse(const std::string& text, ParseOptions opts = {}) {
  std::istringstream in(text);
  return parse_conll(in, opts);
}

// One sentence per bit string; '1' tokens carry the given type.
std::string bits_to_conll(const std::vector<std::string>& sentences, const std::string& type = "PER") {
  std::string out = "-DOCSTART- O\n\n";
  for (const auto& bits : sentences) {
    std::size_t n = 0;
    const auto ann = fx::from_bits(bits, &n);
    Sentence s;
    for (std::size_t t = 1; t <= n; ++t) s.tokens.push_back("w" + std::to_string(t));
    if (!ann.empty()) s.typed_spans.emplace(type, ann);
    const auto tags = to_bio_tags(s);
    for (std::size_t t = 0; t < n; ++t) out += s.tokens[t] + " " + tags[t] + "\n";
    out += "\n";
  }
  return out;
}

}  // namespace

TEST(Conll, BioExample) {
  const auto r = parse("John NNP B-PER\nSmith NNP I-PER\nin IN O\nParis NNP B-LOC\n");
  ASSERT_EQ(r.sentence_count(), 1u);
  const auto& s = r.documents.at(0).sentences.at(0);
  EXPECT_EQ(s.tokens.size(), 4u);
  EXPECT_EQ(s.spans_of("PER"), PlacedAnnotation({{1, 2}}));
  EXPECT_EQ(s.spans_of("LOC"), PlacedAnnotation({{4, 1}}));
  EXPECT_TRUE(r.warnings.empty());
}

TEST(Conll, Iob1) {
  const auto r = parse("a I-PER\nb I-PER\nc O\nd I-LOC\ne B-LOC\n");
  EXPECT_EQ(r.scheme, TagScheme::iob1);
  const auto& s = r.documents.at(0).sentences.at(0);
  EXPECT_EQ(s.spans_of("PER"), PlacedAnnotation({{1, 2}}));
  EXPECT_EQ(s.spans_of("LOC"), PlacedAnnotation({{4, 1}, {5, 1}}));
  EXPECT_TRUE(r.warnings.empty());

  // re-emitted as IOB2 and read back
  std::ostringstream out;
  write_conll(out, r.documents);
  EXPECT_NE(out.str().find("a B-PER\nb I-PER"), std::string::npos);
  const auto again = parse(out.str());
  EXPECT_EQ(again.scheme, TagScheme::iob2);
  EXPECT_EQ(again.documents.at(0).sentences.at(0).typed_spans, s.typed_spans);
}

TEST(Conll, AllOutside) {
  const auto r = parse("a O\nb O\n\nc O\n");
  ASSERT_EQ(r.sentence_count(), 2u);
  EXPECT_TRUE(r.documents[0].sentences[0].typed_spans.empty());
}

TEST(Conll, DocumentsAndLineEndings) {
  const auto r = parse("-DOCSTART- -X- O\r\n\r\na B-ORG\r\n\r\n-DOCSTART- -X- O\r\n\r\nb O\r\nc B-MISC\r\n");
  ASSERT_EQ(r.documents.size(), 2u);
  EXPECT_EQ(r.documents[0].id, "doc1");
  EXPECT_EQ(r.documents[1].id, "doc2");
  EXPECT_EQ(r.documents[1].sentences.at(0).first_line, 7u);
  EXPECT_EQ(r.documents[1].sentences.at(0).spans_of("MISC"), PlacedAnnotation({{2, 1}}));
}

TEST(Conll, Errors) {
  EXPECT_THROW(parse(""), ParseError);
  EXPECT_THROW(parse("\n\n"), ParseError);
  EXPECT_THROW(parse("a X-PER\n"), ParseError);
  EXPECT_THROW(parse("a B-\n"), ParseError);
  EXPECT_THROW(parse("lonely\n"), ParseError);
  try {
    parse("a NN O\nb NN B-PER\nc B-PER\n");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3u);
  }
}

TEST(Conll, DanglingInside) {
  const std::string text = "a B-PER\nb O\nc I-PER\n";
  const auto repaired = parse(text);
  EXPECT_EQ(repaired.scheme, TagScheme::iob2);
  ASSERT_EQ(repaired.warnings.size(), 1u);
  EXPECT_NE(repaired.warnings[0].find("line 3"), std::string::npos);
  EXPECT_EQ(repaired.documents[0].sentences[0].spans_of("PER"), PlacedAnnotation({{1, 1}, {3, 1}}));
  ParseOptions strict;
  strict.strict = true;
  EXPECT_THROW(parse(text, strict), ParseError);
  ParseOptions iob1;
  iob1.scheme = TagScheme::iob1;
  iob1.strict = true;
  EXPECT_NO_THROW(parse(text, iob1));
}

TEST(Conll, RoundTripProperty) {
  fx::InstanceGen gen(31);
  const std::vector<std::string> types = {"PER", "LOC", "ORG", "MISC"};
  for (int trial = 0; trial < 50; ++trial) {
    std::string text;
    for (std::size_t s = 0, count = gen.uniform(1, 5); s < count; ++s) {
      for (std::size_t t = 0, n = gen.uniform(1, 15); t < n; ++t) {
        std::string tag = "O";
        if (gen.uniform(0, 2) > 0) {
          const auto& type = types[gen.uniform(0, 3)];
          tag = (gen.uniform(0, 1) ? "B-" : "I-") + type;
        }
        text += "tok " + tag + "\n";
      }
      text += "\n";
    }
    const auto first = parse(text);
    std::ostringstream out;
    write_conll(out, first.documents);
    const auto second = parse(out.str());
    ASSERT_EQ(first.sentence_count(), second.sentence_count());
    const auto a = flatten(first.documents);
    const auto b = flatten(second.documents);
    for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a[i]->typed_spans, b[i]->typed_spans);
  }
}

TEST(Corpus, IdenticalSystem) {
  const auto gold = parse(bits_to_conll({"0 1 1 0 0 1", "1 0 0 0", "0 0 0"})).documents;
  const auto r = micro_average_report(gold, gold);
  EXPECT_DOUBLE_EQ(r.observed_f1, 1.0);
  ASSERT_TRUE(r.corrected_f1);
  EXPECT_DOUBLE_EQ(*r.corrected_f1, 1.0);
  ASSERT_EQ(r.per_type.size(), 1u);
  EXPECT_DOUBLE_EQ(*r.per_type.at("PER").corrected_f1, 1.0);
}

TEST(Corpus, EmptySystem) {
  const auto gold = parse(bits_to_conll({"0 1 1 0 0 1", "1 0 0 0"})).documents;
  const auto system = parse(bits_to_conll({"0 0 0 0 0 0", "0 0 0 0"})).documents;
  const auto r = micro_average_report(gold, system);
  EXPECT_DOUBLE_EQ(r.observed_f1, 0.0);
  EXPECT_DOUBLE_EQ(r.chance_f1, 0.0);
  EXPECT_DOUBLE_EQ(*r.corrected_f1, 0.0);
}

TEST(Corpus, SingleCaseWithEmptySentence) {
  const auto& c = fx::simulation_cases().front();
  const auto gold = parse(bits_to_conll({c.first, "0 0 0 0 0"})).documents;
  const auto system = parse(bits_to_conll({c.second, "0 0 0 0 0"})).documents;
  const auto r = micro_average_report(gold, system);
  EXPECT_NEAR(r.observed_f1, 0.8571, 5e-4);
  EXPECT_NEAR(r.chance_f1, 0.5335, 5e-4);
  EXPECT_NEAR(*r.corrected_f1, 0.6938, 5e-4);

  // a one-sentence corpus equals the pairwise report exactly
  const auto one_gold = parse(bits_to_conll({c.first})).documents;
  const auto one_system = parse(bits_to_conll({c.second})).documents;
  auto corpus = micro_average_report(one_gold, one_system);
  std::size_t n = 0;
  const auto x = fx::from_bits(c.first, &n);
  const auto y = fx::from_bits(c.second);
  const auto single = agree(SequenceSpec(n), x, y);
  EXPECT_EQ(corpus.scores(), single.scores());
  EXPECT_EQ(corpus.mode, single.mode);
}

TEST(Corpus, Misalignment) {
  const auto gold = parse(bits_to_conll({"0 1 1", "1 0"})).documents;
  const auto fewer = parse(bits_to_conll({"0 1 1"})).documents;
  const auto shorter = parse(bits_to_conll({"0 1 1", "1"})).documents;
  try {
    micro_average_report(gold, shorter);
    FAIL();
  } catch (const AlignmentError& e) {
    EXPECT_EQ(e.sentence(), 1u);
  }
  EXPECT_THROW(micro_average_report(gold, fewer), AlignmentError);
}

TEST(Corpus, WorkerCountDoesNotChangeResults) {
  fx::InstanceGen gen(8);
  std::vector<std::string> g, s;
  for (int i = 0; i < 80; ++i) {
    std::string a, b;
    for (std::size_t t = 0, n = gen.uniform(3, 30); t < n; ++t) {
      a += gen.uniform(0, 3) ? "0 " : "1 ";
      b += gen.uniform(0, 3) ? "0 " : "1 ";
    }
    g.push_back(a);
    s.push_back(b);
  }
  const auto gold = parse(bits_to_conll(g)).documents;
  const auto system = parse(bits_to_conll(s)).documents;
  CorpusOptions one, four;
  one.jobs = 1;
  four.jobs = 4;
  auto r1 = micro_average_report(gold, system, one);
  auto r4 = micro_average_report(gold, system, four);
  r1.runtime_seconds = r4.runtime_seconds = 0;
  EXPECT_EQ(r1, r4);
}

TEST(Partition, Examples) {
  // sentence 0: n=20, gold [3]; 1: all-O; 2: fully covered; 3: n=10 gold [3,3]
  const auto gold = parse(bits_to_conll({"0 0 1 1 1 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0", "0 0 0", "1 1 1 1",
                                         "1 1 1 0 0 1 1 1 0 0"}))
                        .documents;
  const auto p = partition_by_difficulty(gold);
  ASSERT_EQ(p.chance_levels.size(), 4u);
  EXPECT_NEAR(p.chance_levels[0], 0.15843621399176955, 1e-14);
  EXPECT_DOUBLE_EQ(p.chance_levels[1], 1.0);
  EXPECT_NEAR(p.chance_levels[2], 1.0, 1e-15);
  EXPECT_NEAR(p.chance_levels[3], 0.63851851851851849, 1e-14);
  EXPECT_EQ(p.subset1, (std::vector<std::size_t>{1, 2}));
  EXPECT_EQ(p.subset2, (std::vector<std::size_t>{0, 3}));

  const auto all = partition_by_difficulty(gold, 0.0);
  EXPECT_EQ(all.subset1.size(), 4u);
  EXPECT_TRUE(all.subset2.empty());
}

TEST(Partition, TokenStringsDoNotMatter) {
  auto gold = parse("a B-PER\nb I-PER\nc O\nd O\ne B-LOC\nf O\n").documents;
  const double before = sentence_chance_level(gold[0].sentences[0]);
  for (auto& tok : gold[0].sentences[0].tokens) tok = "zzz";
  EXPECT_EQ(before, sentence_chance_level(gold[0].sentences[0]));
  // pooled across types: E[a] and lengths summed within the sentence
  const SequenceSpec seq(6);
  const double pooled = (expected_agreement(seq, {2}, {2}).expected_intersection +
                         expected_agreement(seq, {1}, {1}).expected_intersection) / 3.0;
  EXPECT_NEAR(before, pooled, 1e-15);
}

TEST(Ranking, Changes) {
  const auto a = rank_descending({0.6522, 0.6808});
  const auto b = rank_descending({0.3026, 0.3005});
  EXPECT_EQ(a, (std::vector<std::size_t>{2, 1}));
  EXPECT_EQ(b, (std::vector<std::size_t>{1, 2}));
  EXPECT_EQ(rank_changes(a, b), (std::vector<std::size_t>{0, 1}));
  EXPECT_TRUE(rank_changes(a, a).empty());
}

TEST(Report, CsvRow) {
  AgreementReport r;
  r.set_scores({0.8571, 0.5335, 0.6938, 0.5});
  const auto csv = report_to_string(r, ReportFormat::csv);
  EXPECT_EQ(csv, std::string(kReportCsvHeader) +
                     "\n0.857100,0.533500,0.693800,0.500000,non-overlapping,exact,0.000000,overall\n");
  r.per_type.emplace("PER", Scores{1.0, 1.0, std::nullopt, std::nullopt});
  const auto with_type = report_to_string(r, ReportFormat::csv);
  EXPECT_NE(with_type.find("\n1.000000,1.000000,,,non-overlapping,exact,0.000000,PER\n"), std::string::npos);
}

TEST(Report, JsonRoundTrip) {
  const auto gold = parse("a B-PER\nb I-PER\nc O\nd B-LOC\n\ne O\nf B-ORG\n").documents;
  const auto system = parse("a B-PER\nb O\nc O\nd B-LOC\n\ne B-ORG\nf I-ORG\n").documents;
  const auto report = micro_average_report(gold, system);
  const auto json = report_to_string(report, ReportFormat::json);
  EXPECT_EQ(parse_report_json(json), rounded(report));
  EXPECT_LT(json.find("\"observed_f1\""), json.find("\"chance_f1\""));
  EXPECT_LT(json.find("\"per_type\""), json.find("\"runtime_seconds\""));

  AgreementReport degenerate;
  degenerate.set_scores(make_scores(1.0, 1.0));
  const auto text = report_to_string(degenerate, ReportFormat::json);
  EXPECT_NE(text.find("\"corrected_f1\": null"), std::string::npos);
  EXPECT_EQ(parse_report_json(text), rounded(degenerate));
}

TEST(Report, WriteFailure) {
  std::ostringstream out;
  out.setstate(std::ios::badbit);
  EXPECT_THROW(emit_report(AgreementReport{}, ReportFormat::json, out), Error);
}
