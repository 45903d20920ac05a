#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "persona_lab/metrics/records.hpp"

namespace persona_lab::metrics {

/// sgn with sgn(0) = 0.
int sign_of(double x);

struct CellKey {
  std::string model;
  PersonaCondition persona;
  std::string dataset;

  auto operator<=>(const CellKey&) const = default;
};

struct CellCount {
  std::size_t correct = 0;
  std::size_t total = 0;

  double accuracy() const { return static_cast<double>(correct) / static_cast<double>(total); }
};

/// 100 * (a.accuracy() - b.accuracy()) from integer tallies, so mirrored
/// differences cancel exactly.
double point_difference(const CellCount& a, const CellCount& b);

/// Correct/total tallies per (model, persona, dataset).
class AccuracyTable {
 public:
  AccuracyTable() = default;
  static AccuracyTable from_records(std::span<const ResultRecord> records);

  void add(const ResultRecord& record);

  bool has(const std::string& model, PersonaCondition persona, const std::string& dataset) const;
  /// Throws MissingCell if no record matches.
  double accuracy(const std::string& model, PersonaCondition persona,
                  const std::string& dataset) const;
  const CellCount& count(const std::string& model, PersonaCondition persona,
                         const std::string& dataset) const;

  const std::map<CellKey, CellCount>& cells() const { return cells_; }
  std::vector<std::string> models() const;
  std::vector<std::string> datasets() const;
  /// Models with at least one record on the dataset.
  std::vector<std::string> models_on(const std::string& dataset) const;

 private:
  std::map<CellKey, CellCount> cells_;
};

/// Acc(m, p, d) computed straight from records. Throws MissingCell.
double accuracy(std::span<const ResultRecord> records, const std::string& model,
                PersonaCondition persona, const std::string& dataset);

/// 100 * (Acc(m, p, d) - Acc(m, BASE, d)), in percentage points.
double delta_acc(const AccuracyTable& table, const std::string& model, PersonaCondition persona,
                 const std::string& dataset);

/// Delta-accuracy for every cell whose persona and baseline accuracies both
/// exist, plus the baseline accuracies themselves.
class EffectMatrix {
 public:
  EffectMatrix() = default;
  static EffectMatrix from_table(const AccuracyTable& table);

  bool has(const std::string& model, PersonaCondition persona, const std::string& dataset) const;
  double delta(const std::string& model, PersonaCondition persona,
               const std::string& dataset) const;
  double baseline_accuracy(const std::string& model, const std::string& dataset) const;
  /// Tallies behind delta(); throws MissingCell like delta().
  const CellCount& count(const std::string& model, PersonaCondition persona,
                         const std::string& dataset) const;
  const CellCount& baseline_count(const std::string& model, const std::string& dataset) const;

  const std::map<CellKey, double>& deltas() const { return deltas_; }
  std::vector<std::string> models() const;
  std::vector<std::string> datasets() const;

 private:
  std::map<CellKey, double> deltas_;
  std::map<CellKey, CellCount> counts_;
  std::map<std::pair<std::string, std::string>, CellCount> baseline_counts_;
  std::map<std::pair<std::string, std::string>, double> baseline_;
};

/// Unweighted mean delta over a model subset. Throws InvalidArgument for an
/// empty or duplicated subset, MissingCell for absent cells.
double mean_effect_cross_arch(const EffectMatrix& effects, std::span<const std::string> models,
                              PersonaCondition persona, const std::string& dataset);

/// Fraction of subset models whose delta sign equals the sign of the subset
/// mean, with sgn(0) = 0 compared literally.
double direction_consistency(const EffectMatrix& effects, std::span<const std::string> models,
                             PersonaCondition persona, const std::string& dataset);

/// delta / (100 * baseline accuracy), a signed fraction. Throws
/// UndefinedRelativeEffect when the baseline accuracy is zero.
double relative_effect(const EffectMatrix& effects, const std::string& model,
                       PersonaCondition persona, const std::string& dataset);

struct SensitivityResult {
  double value = 0.0;
  std::size_t included = 0;  // polarity conditions averaged
  std::size_t skipped = 0;   // conditions dropped for a missing cell or undefined relative effect
};

/// Mean |relative effect| over the ten polarity conditions that have one,
/// summed as an exact fraction of the tallies so equal values compare equal.
/// Throws EmptyAggregate when none do.
SensitivityResult sensitivity(const EffectMatrix& effects, const std::string& model,
                              const std::string& dataset);

/// Mean delta over every (model, dataset) cell in the domain group: averaged
/// over models per dataset, then over datasets. Throws EmptyAggregate.
double domain_aggregate(const EffectMatrix& effects, const DomainMap& domains,
                        PersonaCondition persona, DomainGroup group);

struct TrendValue {
  std::optional<double> rho;
  std::string error;  // set when rho is empty
};

struct ScalingTrend {
  TrendValue direction;  // rho(log params, delta)
  TrendValue magnitude;  // rho(log params, sensitivity)
};

/// Spearman trends across a model family. With no persona, the direction
/// trend uses the mean delta over the ten polarity conditions. Requires at
/// least three models with distinct parameter counts.
ScalingTrend scaling_trends(const EffectMatrix& effects, std::span<const ModelSpec> family,
                            std::optional<PersonaCondition> persona, const std::string& dataset);

}  // namespace persona_lab::metrics
