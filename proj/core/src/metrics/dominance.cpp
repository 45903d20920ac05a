#include "persona_lab/metrics/dominance.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "persona_lab/error.hpp"

namespace persona_lab::metrics {

double polarity_gap(const AccuracyTable& table, const std::string& model, Trait trait,
                    const std::string& dataset) {
  return point_difference(table.count(model, PersonaCondition::of(trait, Polarity::High), dataset),
                          table.count(model, PersonaCondition::of(trait, Polarity::Low), dataset));
}

namespace {

TraitDominance summarize(Trait trait, const std::vector<double>& gaps) {
  if (gaps.empty()) throw EmptyAggregate("trait dominance over an empty grid");
  TraitDominance out;
  out.trait = trait;
  out.cells = gaps.size();
  double sum = 0.0, abs_sum = 0.0;
  for (double g : gaps) {
    sum += g;
    abs_sum += std::abs(g);
  }
  const auto n = static_cast<double>(gaps.size());
  out.avg_gap = sum / n;
  out.impact = abs_sum / n;
  const int reference = sign_of(out.avg_gap);
  const auto agree = std::count_if(gaps.begin(), gaps.end(),
                                   [&](double g) { return sign_of(g) == reference; });
  out.uniformity = static_cast<double>(agree) / n;
  return out;
}

}  // namespace

TraitDominance trait_dominance(const AccuracyTable& table, Trait trait) {
  std::vector<double> gaps;
  for (const std::string& d : table.datasets()) {
    for (const std::string& m : table.models_on(d)) gaps.push_back(polarity_gap(table, m, trait, d));
  }
  return summarize(trait, gaps);
}

TraitDominance trait_dominance(const AccuracyTable& table, Trait trait,
                               std::span<const std::string> models,
                               std::span<const std::string> datasets) {
  std::vector<double> gaps;
  for (const std::string& m : models) {
    for (const std::string& d : datasets) gaps.push_back(polarity_gap(table, m, trait, d));
  }
  return summarize(trait, gaps);
}

std::vector<int> competition_ranks(std::span<const double> scores) {
  std::vector<int> ranks(scores.size());
  for (std::size_t i = 0; i < scores.size(); ++i) {
    int better = 0;
    for (double s : scores) {
      if (s > scores[i]) ++better;
    }
    ranks[i] = better + 1;
  }
  return ranks;
}

ConsistencyReport human_consistency(const AccuracyTable& table,
                                    std::span<const HumanHypothesis> hypotheses,
                                    std::span<const TraitComparison> comparisons) {
  if (comparisons.empty()) throw EmptyAggregate("no trait-benchmark comparisons configured");
  ConsistencyReport report;
  for (const TraitComparison& c : comparisons) {
    auto h = std::find_if(hypotheses.begin(), hypotheses.end(),
                          [&](const HumanHypothesis& x) { return x.trait == c.trait; });
    if (h == hypotheses.end()) {
      throw InvalidArgument(std::string("no hypothesis for trait ") + trait_code(c.trait));
    }
    if (h->predicted == PredictedDirection::TaskDependent) {
      throw InvalidArgument(std::string("trait ") + trait_code(c.trait) +
                            " has a task-dependent hypothesis and cannot be scored");
    }
    const auto models = table.models_on(c.dataset);
    if (models.empty()) throw MissingCell("no records for dataset " + c.dataset);
    double sum = 0.0;
    for (const std::string& m : models) sum += polarity_gap(table, m, c.trait, c.dataset);
    ComparisonOutcome outcome;
    outcome.comparison = c;
    outcome.mean_gap = sum / static_cast<double>(models.size());
    outcome.predicted = h->predicted;
    const int expected = h->predicted == PredictedDirection::High ? 1 : -1;
    outcome.match = sign_of(outcome.mean_gap) == expected;

    auto& per = report.per_trait[static_cast<std::size_t>(c.trait)];
    ++per.total;
    ++report.total;
    if (outcome.match) {
      ++per.matches;
      ++report.matches;
    }
    report.outcomes.push_back(std::move(outcome));
  }
  report.rate = static_cast<double>(report.matches) / static_cast<double>(report.total);
  return report;
}

}  // namespace persona_lab::metrics
