#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "persona_lab/error.hpp"
#include "persona_lab/metrics/dominance.hpp"

using namespace persona_lab;
using namespace persona_lab::metrics;

namespace {

PersonaCondition P(const std::string& code) { return *PersonaCondition::parse(code); }

void add_cell(std::vector<ResultRecord>& out, const std::string& model, const std::string& persona,
              const std::string& dataset, int correct, int total) {
  for (int i = 0; i < total; ++i) {
    out.push_back({model, P(persona), dataset, "i" + std::to_string(i), i < correct});
  }
}

// High/low accuracies for `trait` with a gap of `gap` pp over 100 items.
void add_gap(std::vector<ResultRecord>& out, const std::string& model, char trait,
             const std::string& dataset, int gap) {
  const std::string t(1, trait);
  add_cell(out, model, t + "_H", dataset, 50 + gap, 100);
  add_cell(out, model, t + "_L", dataset, 50, 100);
}

}  // namespace

TEST(PolarityGap, ForcedArithmetic) {
  std::vector<ResultRecord> r;
  add_cell(r, "m", "O_H", "d", 60, 100);
  add_cell(r, "m", "O_L", "d", 50, 100);
  add_cell(r, "m", "C_H", "d", 40, 100);
  add_cell(r, "m", "C_L", "d", 40, 100);
  const auto t = AccuracyTable::from_records(r);
  EXPECT_NEAR(polarity_gap(t, "m", Trait::O, "d"), 10.0, 1e-12);
  EXPECT_EQ(polarity_gap(t, "m", Trait::C, "d"), 0.0);
  EXPECT_THROW(polarity_gap(t, "m", Trait::E, "d"), MissingCell);
}

TEST(TraitDominance, UniformAndCancellingGrids) {
  std::vector<ResultRecord> r;
  add_gap(r, "m1", 'O', "d1", 5);
  add_gap(r, "m1", 'O', "d2", 5);
  add_gap(r, "m2", 'O', "d1", 5);
  add_gap(r, "m2", 'O', "d2", 5);
  auto d = trait_dominance(AccuracyTable::from_records(r), Trait::O);
  EXPECT_NEAR(d.impact, 5.0, 1e-12);
  EXPECT_NEAR(d.avg_gap, 5.0, 1e-12);
  EXPECT_EQ(d.uniformity, 1.0);
  EXPECT_EQ(d.cells, 4u);

  std::vector<ResultRecord> c;
  add_gap(c, "m1", 'E', "d1", 5);
  add_gap(c, "m1", 'E', "d2", -5);
  d = trait_dominance(AccuracyTable::from_records(c), Trait::E);
  EXPECT_NEAR(d.impact, 5.0, 1e-12);
  EXPECT_NEAR(d.avg_gap, 0.0, 1e-12);
  EXPECT_EQ(d.uniformity, 0.0);
}

TEST(TraitDominance, RandomGridsMatchTallyOracle) {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 40; ++trial) {
    const auto g = testkit::make_random_grid(rng, 4, 6, 30);
    const auto table = AccuracyTable::from_records(g.records);
    for (auto t : kTraits) {
      const auto got = trait_dominance(table, t);
      const auto want = testkit::oracle::dominance(g.records, g.models, g.datasets, trait_code(t));
      EXPECT_NEAR(got.impact, want.impact, 1e-12);
      EXPECT_NEAR(got.avg_gap, want.avg_gap, 1e-12);
      EXPECT_NEAR(got.uniformity, want.uniformity, 1e-12);
      EXPECT_GE(got.impact + 1e-12, std::fabs(got.avg_gap));
      EXPECT_GE(got.uniformity, 0.0);
      EXPECT_LE(got.uniformity, 1.0);
    }
  }
}

TEST(CompetitionRanks, TiesShareLowestRank) {
  const std::vector<double> uni{0.905, 0.905, 0.738, 0.881, 0.571};
  EXPECT_EQ(competition_ranks(uni), (std::vector<int>{1, 1, 4, 3, 5}));
  const std::vector<double> flat{1, 1, 1};
  EXPECT_EQ(competition_ranks(flat), (std::vector<int>{1, 1, 1}));
}

namespace {

// Per-trait gaps on datasets d0..d(n-1) for a single model; sign decides the
// comparison outcome.
std::vector<ResultRecord> gaps_for(const std::vector<std::pair<char, std::vector<int>>>& rows) {
  std::vector<ResultRecord> r;
  for (const auto& [trait, gaps] : rows) {
    for (std::size_t i = 0; i < gaps.size(); ++i) add_gap(r, "m", trait, "d" + std::to_string(i), gaps[i]);
  }
  return r;
}

}  // namespace

TEST(HumanConsistency, FourteenOfNineteen) {
  // O: 7/8 (high predicted), C: 4/5, E: 2/3, N: 1/3 (low predicted).
  const auto r = gaps_for({{'O', {3, 4, 1, 2, 6, 5, 2, -1}},
                           {'C', {1, 2, 3, 4, -2}},
                           {'E', {5, 5, -5}},
                           {'N', {-3, 2, 4}}});
  std::vector<TraitComparison> comps;
  for (int i = 0; i < 8; ++i) comps.push_back({Trait::O, "d" + std::to_string(i)});
  for (int i = 0; i < 5; ++i) comps.push_back({Trait::C, "d" + std::to_string(i)});
  for (int i = 0; i < 3; ++i) comps.push_back({Trait::E, "d" + std::to_string(i)});
  for (int i = 0; i < 3; ++i) comps.push_back({Trait::N, "d" + std::to_string(i)});
  const auto hyps = default_hypotheses();
  const auto rep = human_consistency(AccuracyTable::from_records(r), hyps, comps);
  EXPECT_EQ(rep.matches, 14u);
  EXPECT_EQ(rep.total, 19u);
  EXPECT_NEAR(100.0 * rep.rate, 73.68, 0.01);
  const auto& o = rep.per_trait[static_cast<std::size_t>(Trait::O)];
  EXPECT_EQ(o.matches, 7u);
  EXPECT_EQ(o.total, 8u);
  EXPECT_EQ(100.0 * o.rate(), 87.5);
  ASSERT_EQ(rep.outcomes.size(), 19u);
  EXPECT_FALSE(rep.outcomes[7].match);
}

TEST(HumanConsistency, AllMatchAndValidation) {
  const auto r = gaps_for({{'O', {1, 2}}, {'N', {-1, -2}}, {'A', {1, 1}}});
  const auto hyps = default_hypotheses();
  const std::vector<TraitComparison> ok{{Trait::O, "d0"}, {Trait::O, "d1"}, {Trait::N, "d1"}};
  const auto table = AccuracyTable::from_records(r);
  EXPECT_EQ(human_consistency(table, hyps, ok).rate, 1.0);

  const std::vector<TraitComparison> agree{{Trait::A, "d0"}};
  EXPECT_THROW(human_consistency(table, hyps, agree), InvalidArgument);
  EXPECT_THROW(human_consistency(table, hyps, std::vector<TraitComparison>{}), EmptyAggregate);
  const std::vector<HumanHypothesis> only_o{{Trait::O, PredictedDirection::High}};
  const std::vector<TraitComparison> n_only{{Trait::N, "d0"}};
  EXPECT_THROW(human_consistency(table, only_o, n_only), InvalidArgument);
}

TEST(HumanConsistency, ZeroGapNeverMatches) {
  const auto r = gaps_for({{'O', {0}}, {'N', {0}}});
  const std::vector<TraitComparison> comps{{Trait::O, "d0"}, {Trait::N, "d0"}};
  const auto hyps = default_hypotheses();
  EXPECT_EQ(human_consistency(AccuracyTable::from_records(r), hyps, comps).matches, 0u);
}

TEST(HumanConsistency, GapAveragesOverModelsOnDataset) {
  std::vector<ResultRecord> r;
  add_gap(r, "m1", 'O', "d", 6);
  add_gap(r, "m2", 'O', "d", -4);
  add_gap(r, "m3", 'O', "other", -50);
  const std::vector<TraitComparison> comps{{Trait::O, "d"}};
  const auto hyps = default_hypotheses();
  const auto rep = human_consistency(AccuracyTable::from_records(r), hyps, comps);
  EXPECT_NEAR(rep.outcomes[0].mean_gap, 1.0, 1e-12);
  EXPECT_TRUE(rep.outcomes[0].match);
}
