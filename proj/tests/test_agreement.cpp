#include <gtest/gtest.h>

#include <cmath>

#include "support.hpp"

using namespace seqagree;
namespace fx = seqagree::testing;

namespace {

// Table values carry four decimals, some truncated rather than rounded.
constexpr double kTableTolerance = 5e-4;

struct Pair {
  SequenceSpec seq;
  PlacedAnnotation first;
  PlacedAnnotation second;
};

Pair pair_of(const char* a, const char* b) {
  std::size_t n1 = 0, n2 = 0;
  auto x = fx::from_bits(a, &n1);
  auto y = fx::from_bits(b, &n2);
  EXPECT_EQ(n1, n2);
  return {SequenceSpec(n1), std::move(x), std::move(y)};
}

}  // namespace

TEST(TokenF1, Examples) {
  const auto& sim1 = fx::simulation_cases().front();
  const auto p = pair_of(sim1.first, sim1.second);
  EXPECT_EQ(intersection_size(p.first, p.second), 9u);
  EXPECT_NEAR(token_f1(p.seq, p.first, p.second), 18.0 / 21.0, 1e-15);
  EXPECT_DOUBLE_EQ(token_f1(p.seq, p.first, p.first), 1.0);

  const auto g = pair_of(fx::kSim4Gold, fx::kSim4First);
  EXPECT_NEAR(token_f1(g.seq, g.first, g.second), 0.6522, kTableTolerance);

  const SequenceSpec five(5);
  EXPECT_DOUBLE_EQ(token_f1(five, PlacedAnnotation(), PlacedAnnotation()), 1.0);
  EXPECT_DOUBLE_EQ(token_f1(five, PlacedAnnotation({{1, 2}}), PlacedAnnotation()), 0.0);
  EXPECT_THROW(token_f1(five, PlacedAnnotation({{4, 3}}), PlacedAnnotation()), InvalidArgument);
}

TEST(PairOverlap, MatchesDoubleSum) {
  const SequenceSpec seq(20);
  const auto d9 = location_distribution(seq, {9}, 1);
  const auto d12 = location_distribution(seq, {12}, 1);
  EXPECT_NEAR(expected_pair_overlap(d9, d12), 61.0 / 9.0, 1e-12);
  EXPECT_NEAR(fx::double_sum_pair_overlap(d9, d12), 61.0 / 9.0, 1e-12);

  // two length-1 segments on 10 tokens meet with probability 1/10
  const SequenceSpec ten(10);
  const auto d1 = location_distribution(ten, {1}, 1);
  EXPECT_NEAR(expected_pair_overlap(d1, d1), 0.1, 1e-15);

  fx::InstanceGen gen(11);
  for (int trial = 0; trial < 200; ++trial) {
    const SequenceSpec s(gen.uniform(1, 60));
    const auto p1 = gen.profile(4, 8, 1);
    const auto p2 = gen.profile(4, 8, 1);
    if (!p1.fits(s) || !p2.fits(s)) continue;
    const auto a = location_distribution(s, p1, gen.uniform(1, p1.count()));
    const auto b = location_distribution(s, p2, gen.uniform(1, p2.count()));
    EXPECT_NEAR(expected_pair_overlap(a, b), fx::double_sum_pair_overlap(a, b), 1e-10);
  }
}

TEST(ChanceF1, SimulationTables) {
  for (const auto& c : fx::simulation_cases()) {
    SCOPED_TRACE(c.name);
    const auto p = pair_of(c.first, c.second);
    const auto r = agree(p.seq, p.first, p.second);
    EXPECT_NEAR(r.observed_f1, c.observed, kTableTolerance);
    EXPECT_NEAR(r.chance_f1, c.chance, kTableTolerance);
    ASSERT_TRUE(r.corrected_f1);
    EXPECT_NEAR(*r.corrected_f1, c.corrected, kTableTolerance);
    EXPECT_EQ(r.mode, ComputeMode::exact);
  }
}

TEST(ChanceF1, FrozenDerivedValues) {
  // Values fixed by exhaustive enumeration of both configuration sets.
  EXPECT_NEAR(chance_f1(SequenceSpec(20), {2, 3, 4}, {3, 4, 5}), 0.53346, 5e-6);
  EXPECT_NEAR(chance_f1(SequenceSpec(20), {9}, {12}), 0.64550264550264547, 1e-14);
  EXPECT_NEAR(chance_f1(SequenceSpec(20), {3}, {4}), 0.18300653594771241, 1e-14);
  EXPECT_NEAR(chance_f1(SequenceSpec(20), {2, 3, 4}, {2, 3, 4}), 0.46548062573703597, 1e-14);
  EXPECT_NEAR(chance_f1(SequenceSpec(12), {2, 3}, {3}), 0.33194444444444443, 1e-14);
  EXPECT_NEAR(chance_f1(SequenceSpec(10), {3, 3}, {3, 3}), 0.63851851851851849, 1e-14);
}

TEST(ChanceF1, RankingReversal) {
  const auto gold = pair_of(fx::kSim4Gold, fx::kSim4First);
  const auto other = pair_of(fx::kSim4Gold, fx::kSim4Second);
  const auto r1 = agree(gold.seq, gold.first, gold.second);
  const auto r2 = agree(other.seq, other.first, other.second);
  EXPECT_NEAR(r1.observed_f1, 0.6522, kTableTolerance);
  EXPECT_NEAR(r1.chance_f1, 0.5013, kTableTolerance);
  EXPECT_NEAR(*r1.corrected_f1, 0.3026, kTableTolerance);
  EXPECT_NEAR(r2.observed_f1, 0.6808, kTableTolerance);
  EXPECT_NEAR(r2.chance_f1, 0.5437, kTableTolerance);
  EXPECT_NEAR(*r2.corrected_f1, 0.3005, kTableTolerance);
  EXPECT_LT(r1.observed_f1, r2.observed_f1);
  EXPECT_GT(*r1.corrected_f1, *r2.corrected_f1);
}

TEST(ChanceF1, DecreasesWithSequenceLength) {
  double prev = 2.0;
  for (std::size_t n = 12; n <= 400; n += 7) {
    const double c = chance_f1(SequenceSpec(n), {2, 3}, {3});
    EXPECT_LT(c, prev) << n;
    prev = c;
  }
}

TEST(ChanceF1, SymmetricAndBounded) {
  fx::InstanceGen gen(5);
  for (int trial = 0; trial < 150; ++trial) {
    const SequenceSpec s(gen.uniform(1, 40));
    const auto p1 = gen.profile(3, 6);
    const auto p2 = gen.profile(3, 6);
    if (!p1.fits(s) || !p2.fits(s)) continue;
    const double ab = chance_f1(s, p1, p2);
    EXPECT_NEAR(ab, chance_f1(s, p2, p1), 1e-14);
    EXPECT_GE(ab, 0.0);
    EXPECT_LE(ab, 1.0 + 1e-12);
  }
}

TEST(ChanceF1, OverlappingModelForSingleSegments) {
  // With one segment per annotator both models coincide.
  ModelOptions overlap;
  overlap.model = Model::overlapping;
  for (std::size_t n : {5u, 20u, 77u})
    EXPECT_NEAR(chance_f1(SequenceSpec(n), {3}, {4}, overlap), chance_f1(SequenceSpec(n), {3}, {4}), 1e-14);
  EXPECT_NO_THROW(chance_f1(SequenceSpec(6), {4, 4}, {1}, overlap));
  EXPECT_THROW(chance_f1(SequenceSpec(6), {4, 4}, {1}), InfeasibleProfile);
}

TEST(CorrectedF1, Examples) {
  EXPECT_NEAR(corrected_f1(0.8571, 0.5335), 0.6938, kTableTolerance);
  EXPECT_NEAR(corrected_f1(0.6808, 0.5437), 0.3005, kTableTolerance);
  EXPECT_DOUBLE_EQ(corrected_f1(0.42, 0.0), 0.42);
  EXPECT_LT(corrected_f1(0.1, 0.5), 0.0);
  EXPECT_THROW(corrected_f1(1.0, 1.0), DegenerateChance);
  const auto s = make_scores(1.0, 1.0);
  EXPECT_FALSE(s.corrected_f1);
}

TEST(CorrectedF1, FullCoverageIsDegenerate) {
  const SequenceSpec seq(4);
  const PlacedAnnotation all({{1, 4}});
  const auto r = agree(seq, all, all);
  EXPECT_DOUBLE_EQ(r.chance_f1, 1.0);
  EXPECT_FALSE(r.corrected_f1);
  EXPECT_NEAR(*r.difficulty, 0.0, 1e-15);
}

TEST(Difficulty, Examples) {
  const SequenceSpec seq(20);
  EXPECT_NEAR(difficulty(seq, {{2, 3, 4}}), 1.0 - 0.46548062573703597, 1e-14);
  EXPECT_NEAR(difficulty(seq, {{2, 3, 4}, {2, 3, 4}}), difficulty(seq, {{2, 3, 4}}), 1e-15);
  EXPECT_NEAR(difficulty(SequenceSpec(6), {{2, 4}}), 0.0, 1e-15);
  const double mixed = difficulty(seq, {{2, 3, 4}, {3, 4, 5}});
  const double expected = 1.0 - (chance_f1(seq, {2, 3, 4}, {2, 3, 4}) + chance_f1(seq, {3, 4, 5}, {3, 4, 5}) +
                                 2 * chance_f1(seq, {2, 3, 4}, {3, 4, 5})) / 4;
  EXPECT_NEAR(mixed, expected, 1e-14);
  EXPECT_THROW(difficulty(seq, {}), InvalidArgument);
}

TEST(Difficulty, FixedReference) {
  const SequenceSpec seq(10);
  // single segment: overlap of a fixed and a uniformly placed segment
  const PlacedAnnotation gold({{1, 2}});
  const double fixed = difficulty_against_fixed(seq, gold);
  // coverage of tokens 1 and 2 by a random length-2 segment over 9 starts: 1/9 + 2/9
  EXPECT_NEAR(fixed, 1.0 - (3.0 / 9.0) / 2.0, 1e-14);
  EXPECT_NEAR(difficulty_against_fixed(seq, PlacedAnnotation()), 0.0, 0.0);
}

TEST(ZeroAgreement, Examples) {
  EXPECT_NEAR(zero_agreement_probability(SequenceSpec(2), {1}, {1}), 0.5, 1e-15);
  EXPECT_EQ(zero_agreement_probability(SequenceSpec(4), {3}, {2}), 0.0);
  // [1] vs [1] on n tokens: 1 - 1/n
  EXPECT_NEAR(zero_agreement_probability(SequenceSpec(50), {1}, {1}), 0.98, 1e-15);
}

TEST(ZeroAgreement, MatchesEnumeration) {
  fx::InstanceGen gen(3);
  for (int trial = 0; trial < 60; ++trial) {
    const SequenceSpec s(gen.uniform(2, 10));
    const auto p1 = gen.profile(2, 3, 1);
    const auto p2 = gen.profile(2, 3, 1);
    if (!p1.fits(s) || !p2.fits(s)) continue;
    std::vector<std::vector<char>> masks;
    for_each_configuration(s, p1, [&](const Configuration& c) { masks.push_back(c.annotation().mask(s)); });
    std::uint64_t disjoint = 0, pairs = 0;
    for_each_configuration(s, p2, [&](const Configuration& c) {
      const auto m = c.annotation().mask(s);
      for (const auto& o : masks) {
        bool hit = false;
        for (std::size_t t = 0; t < m.size(); ++t) hit |= m[t] && o[t];
        disjoint += !hit;
        ++pairs;
      }
    });
    EXPECT_NEAR(zero_agreement_probability(s, p1, p2), double(disjoint) / double(pairs), 1e-14);
  }
}

TEST(ZeroAgreement, Asymptotics) {
  double prev_zero = 0.0;
  double prev_chance = 1.0;
  for (std::size_t n : {100u, 1000u, 10000u}) {
    const SequenceSpec seq(n);
    const double z = zero_agreement_probability(seq, {2, 3}, {3});
    const double c = chance_f1(seq, {2, 3}, {3});
    EXPECT_GT(z, prev_zero);
    EXPECT_LT(z, 1.0);
    EXPECT_LT(c, prev_chance);
    prev_zero = z;
    prev_chance = c;
  }
  EXPECT_LT(prev_chance, 0.01);
  EXPECT_GT(prev_zero, 0.999);
}

TEST(ZeroAgreement, LogPathMatchesExact) {
  ModelOptions log_opts;
  log_opts.arithmetic = Arithmetic::log_space;
  for (std::size_t n : {30u, 300u, 3000u})
    EXPECT_NEAR(zero_agreement_probability(SequenceSpec(n), {2, 3}, {3}, log_opts),
                zero_agreement_probability(SequenceSpec(n), {2, 3}, {3}), 1e-10);
}

TEST(UniformApproximation, LongSequence) {
  const SequenceSpec seq(10000);
  const SegmentProfile p1{3, 4};
  ASSERT_TRUE(uniform_approx_applicable(seq, p1, 1, 0.99));
  ModelOptions approx;
  approx.approx_alpha = 0.99;
  const auto e = expected_agreement(seq, p1, p1, approx);
  EXPECT_EQ(e.mode, ComputeMode::uniform_approximation);
  ModelOptions exact;
  exact.arithmetic = Arithmetic::exact;
  const auto reference = expected_agreement(seq, p1, p1, exact);
  EXPECT_EQ(reference.mode, ComputeMode::exact);
  EXPECT_LT(std::fabs(e.f1() - reference.f1()), 1e-3);
}
