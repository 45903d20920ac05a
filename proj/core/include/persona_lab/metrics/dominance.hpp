#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "persona_lab/metrics/effects.hpp"

namespace persona_lab::metrics {

/// 100 * (Acc(m, t_H, d) - Acc(m, t_L, d)).
double polarity_gap(const AccuracyTable& table, const std::string& model, Trait trait,
                    const std::string& dataset);

struct TraitDominance {
  Trait trait = Trait::A;
  double impact = 0.0;      // mean |gap|, pp
  double avg_gap = 0.0;     // mean gap, pp
  double uniformity = 0.0;  // fraction of cells with sgn(gap) == sgn(avg_gap)
  std::size_t cells = 0;
};

/// Dominance over every (model, dataset) pair present in the table. Each pair
/// must have both polarity accuracies (MissingCell otherwise).
TraitDominance trait_dominance(const AccuracyTable& table, Trait trait);
/// Dominance over the explicit models x datasets grid.
TraitDominance trait_dominance(const AccuracyTable& table, Trait trait,
                               std::span<const std::string> models,
                               std::span<const std::string> datasets);

/// Competition ranks ("1224") for scores sorted descending; exact ties share
/// the lowest rank.
std::vector<int> competition_ranks(std::span<const double> scores);

struct TraitConsistency {
  std::size_t matches = 0;
  std::size_t total = 0;
  double rate() const { return total ? static_cast<double>(matches) / static_cast<double>(total) : 0.0; }
};

struct ComparisonOutcome {
  TraitComparison comparison;
  double mean_gap = 0.0;  // pp, averaged over models evaluated on the dataset
  PredictedDirection predicted = PredictedDirection::High;
  bool match = false;
};

struct ConsistencyReport {
  std::size_t matches = 0;
  std::size_t total = 0;
  double rate = 0.0;
  std::array<TraitConsistency, 5> per_trait{};  // indexed by Trait
  std::vector<ComparisonOutcome> outcomes;
};

/// A comparison matches when the model-averaged gap has the predicted sign
/// (high: positive, low: negative). Throws InvalidArgument if a comparison's
/// trait has no hypothesis or a task-dependent one, EmptyAggregate for an
/// empty list.
ConsistencyReport human_consistency(const AccuracyTable& table,
                                    std::span<const HumanHypothesis> hypotheses,
                                    std::span<const TraitComparison> comparisons);

}  // namespace persona_lab::metrics
