#include "persona_lab/metrics/effects.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "persona_lab/error.hpp"
#include "persona_lab/metrics/spearman.hpp"

namespace persona_lab::metrics {

namespace {

std::string cell_name(const std::string& model, PersonaCondition persona,
                      const std::string& dataset) {
  return "(" + model + ", " + persona.code() + ", " + dataset + ")";
}

std::vector<std::string> sorted_subset(std::span<const std::string> models) {
  if (models.empty()) throw InvalidArgument("model subset is empty");
  std::vector<std::string> out(models.begin(), models.end());
  std::sort(out.begin(), out.end());
  if (std::adjacent_find(out.begin(), out.end()) != out.end()) {
    throw InvalidArgument("model subset contains duplicates");
  }
  return out;
}

double mean_of(std::span<const double> values) {
  double sum = 0.0;
  for (double v : values) sum += v;
  return sum / static_cast<double>(values.size());
}

}  // namespace

int sign_of(double x) { return (x > 0.0) - (x < 0.0); }

namespace {

__extension__ typedef __int128 Wide;

Wide gcd_of(Wide a, Wide b) {
  if (a < 0) a = -a;
  while (b != 0) {
    const Wide t = a % b;
    a = b;
    b = t < 0 ? -t : t;
  }
  return a;
}

// Nonnegative running sum of fractions, kept in lowest terms.
struct Fraction {
  Wide num = 0;
  Wide den = 1;

  void add(Wide n, Wide d) {
    const Wide g = gcd_of(den, d);
    num = num * (d / g) + n * (den / g);
    den = den / g * d;
    reduce();
  }

  double divided_by(std::size_t k) {
    den *= static_cast<Wide>(k);
    reduce();
    return static_cast<double>(num) / static_cast<double>(den);
  }

  void reduce() {
    const Wide g = gcd_of(num, den);
    if (g > 1) {
      num /= g;
      den /= g;
    }
  }
};

}  // namespace

AccuracyTable AccuracyTable::from_records(std::span<const ResultRecord> records) {
  AccuracyTable table;
  for (const ResultRecord& r : records) table.add(r);
  return table;
}

void AccuracyTable::add(const ResultRecord& record) {
  CellCount& c = cells_[CellKey{record.model, record.persona, record.dataset}];
  ++c.total;
  if (record.correct) ++c.correct;
}

bool AccuracyTable::has(const std::string& model, PersonaCondition persona,
                        const std::string& dataset) const {
  return cells_.count(CellKey{model, persona, dataset}) != 0;
}

const CellCount& AccuracyTable::count(const std::string& model, PersonaCondition persona,
                                      const std::string& dataset) const {
  auto it = cells_.find(CellKey{model, persona, dataset});
  if (it == cells_.end()) throw MissingCell("no records for " + cell_name(model, persona, dataset));
  return it->second;
}

double AccuracyTable::accuracy(const std::string& model, PersonaCondition persona,
                               const std::string& dataset) const {
  return count(model, persona, dataset).accuracy();
}

std::vector<std::string> AccuracyTable::models() const {
  std::set<std::string> s;
  for (const auto& [k, c] : cells_) s.insert(k.model);
  return {s.begin(), s.end()};
}

std::vector<std::string> AccuracyTable::datasets() const {
  std::set<std::string> s;
  for (const auto& [k, c] : cells_) s.insert(k.dataset);
  return {s.begin(), s.end()};
}

std::vector<std::string> AccuracyTable::models_on(const std::string& dataset) const {
  std::set<std::string> s;
  for (const auto& [k, c] : cells_) {
    if (k.dataset == dataset) s.insert(k.model);
  }
  return {s.begin(), s.end()};
}

double accuracy(std::span<const ResultRecord> records, const std::string& model,
                PersonaCondition persona, const std::string& dataset) {
  std::size_t correct = 0, total = 0;
  for (const ResultRecord& r : records) {
    if (r.model == model && r.persona == persona && r.dataset == dataset) {
      ++total;
      if (r.correct) ++correct;
    }
  }
  if (total == 0) throw MissingCell("no records for " + cell_name(model, persona, dataset));
  return static_cast<double>(correct) / static_cast<double>(total);
}

double point_difference(const CellCount& a, const CellCount& b) {
  const auto num = static_cast<long long>(a.correct * b.total) - static_cast<long long>(b.correct * a.total);
  return 100.0 * static_cast<double>(num) / (static_cast<double>(a.total) * static_cast<double>(b.total));
}

double delta_acc(const AccuracyTable& table, const std::string& model, PersonaCondition persona,
                 const std::string& dataset) {
  return point_difference(table.count(model, persona, dataset),
                          table.count(model, PersonaCondition::baseline(), dataset));
}

EffectMatrix EffectMatrix::from_table(const AccuracyTable& table) {
  EffectMatrix m;
  for (const auto& [key, count] : table.cells()) {
    if (!key.persona.is_baseline()) continue;
    m.baseline_[{key.model, key.dataset}] = count.accuracy();
    m.baseline_counts_[{key.model, key.dataset}] = count;
  }
  for (const auto& [key, count] : table.cells()) {
    auto base = m.baseline_counts_.find({key.model, key.dataset});
    if (base == m.baseline_counts_.end()) continue;
    m.deltas_[key] = point_difference(count, base->second);
    m.counts_[key] = count;
  }
  return m;
}

bool EffectMatrix::has(const std::string& model, PersonaCondition persona,
                       const std::string& dataset) const {
  return deltas_.count(CellKey{model, persona, dataset}) != 0;
}

double EffectMatrix::delta(const std::string& model, PersonaCondition persona,
                           const std::string& dataset) const {
  auto it = deltas_.find(CellKey{model, persona, dataset});
  if (it == deltas_.end()) {
    throw MissingCell("no delta-accuracy for " + cell_name(model, persona, dataset));
  }
  return it->second;
}

double EffectMatrix::baseline_accuracy(const std::string& model, const std::string& dataset) const {
  auto it = baseline_.find({model, dataset});
  if (it == baseline_.end()) {
    throw MissingCell("no baseline accuracy for " +
                      cell_name(model, PersonaCondition::baseline(), dataset));
  }
  return it->second;
}

const CellCount& EffectMatrix::count(const std::string& model, PersonaCondition persona,
                                     const std::string& dataset) const {
  auto it = counts_.find(CellKey{model, persona, dataset});
  if (it == counts_.end()) {
    throw MissingCell("no delta-accuracy for " + cell_name(model, persona, dataset));
  }
  return it->second;
}

const CellCount& EffectMatrix::baseline_count(const std::string& model,
                                              const std::string& dataset) const {
  auto it = baseline_counts_.find({model, dataset});
  if (it == baseline_counts_.end()) {
    throw MissingCell("no baseline accuracy for " +
                      cell_name(model, PersonaCondition::baseline(), dataset));
  }
  return it->second;
}

std::vector<std::string> EffectMatrix::models() const {
  std::set<std::string> s;
  for (const auto& [k, v] : baseline_) s.insert(k.first);
  return {s.begin(), s.end()};
}

std::vector<std::string> EffectMatrix::datasets() const {
  std::set<std::string> s;
  for (const auto& [k, v] : baseline_) s.insert(k.second);
  return {s.begin(), s.end()};
}

double mean_effect_cross_arch(const EffectMatrix& effects, std::span<const std::string> models,
                              PersonaCondition persona, const std::string& dataset) {
  std::vector<double> values;
  for (const std::string& m : sorted_subset(models)) values.push_back(effects.delta(m, persona, dataset));
  return mean_of(values);
}

double direction_consistency(const EffectMatrix& effects, std::span<const std::string> models,
                             PersonaCondition persona, const std::string& dataset) {
  const auto subset = sorted_subset(models);
  std::vector<double> values;
  for (const std::string& m : subset) values.push_back(effects.delta(m, persona, dataset));
  const int reference = sign_of(mean_of(values));
  std::size_t agree = 0;
  for (double v : values) {
    if (sign_of(v) == reference) ++agree;
  }
  return static_cast<double>(agree) / static_cast<double>(values.size());
}

double relative_effect(const EffectMatrix& effects, const std::string& model,
                       PersonaCondition persona, const std::string& dataset) {
  const double base = effects.baseline_accuracy(model, dataset);
  const double delta = effects.delta(model, persona, dataset);
  if (base == 0.0) {
    throw UndefinedRelativeEffect("baseline accuracy is zero for " +
                                  cell_name(model, persona, dataset));
  }
  return delta / (100.0 * base);
}

SensitivityResult sensitivity(const EffectMatrix& effects, const std::string& model,
                              const std::string& dataset) {
  SensitivityResult result;
  Fraction sum;
  for (PersonaCondition p : polarity_conditions()) {
    if (!effects.has(model, p, dataset)) {
      ++result.skipped;
      continue;
    }
    const CellCount& base = effects.baseline_count(model, dataset);
    if (base.correct == 0) {
      ++result.skipped;
      continue;
    }
    const CellCount& cell = effects.count(model, p, dataset);
    const Wide num = static_cast<Wide>(cell.correct) * static_cast<Wide>(base.total) -
                     static_cast<Wide>(base.correct) * static_cast<Wide>(cell.total);
    sum.add(num < 0 ? -num : num, static_cast<Wide>(cell.total) * static_cast<Wide>(base.correct));
    ++result.included;
  }
  if (result.included == 0) {
    throw EmptyAggregate("sensitivity of (" + model + ", " + dataset +
                         ") has no defined relative effects");
  }
  result.value = sum.divided_by(result.included);
  return result;
}

double domain_aggregate(const EffectMatrix& effects, const DomainMap& domains,
                        PersonaCondition persona, DomainGroup group) {
  const auto models = effects.models();
  std::vector<double> dataset_means;
  for (const std::string& d : effects.datasets()) {
    if (domains.group_of(d) != group) continue;
    std::vector<double> cells;
    for (const std::string& m : models) {
      if (effects.has(m, persona, d)) cells.push_back(effects.delta(m, persona, d));
    }
    if (!cells.empty()) dataset_means.push_back(mean_of(cells));
  }
  if (dataset_means.empty()) {
    throw EmptyAggregate("no cells for " + persona.code() + " in domain " +
                         std::string(domain_tag(group)));
  }
  return mean_of(dataset_means);
}

ScalingTrend scaling_trends(const EffectMatrix& effects, std::span<const ModelSpec> family,
                            std::optional<PersonaCondition> persona, const std::string& dataset) {
  if (family.size() < 3) throw InvalidArgument("scaling trends need at least three model scales");
  std::vector<ModelSpec> ordered(family.begin(), family.end());
  std::sort(ordered.begin(), ordered.end(),
            [](const ModelSpec& a, const ModelSpec& b) { return a.params_b < b.params_b; });
  for (std::size_t i = 0; i < ordered.size(); ++i) {
    if (!(ordered[i].params_b > 0.0)) throw InvalidArgument("parameter counts must be positive");
    if (i > 0 && ordered[i].params_b == ordered[i - 1].params_b) {
      throw InvalidArgument("scaling family has duplicate parameter counts");
    }
  }

  std::vector<double> log_params;
  for (const ModelSpec& m : ordered) log_params.push_back(std::log(m.params_b));

  ScalingTrend trend;
  auto run = [&](TrendValue& out, auto&& value_for) {
    try {
      std::vector<double> ys;
      for (const ModelSpec& m : ordered) ys.push_back(value_for(m.name));
      out.rho = spearman_rho(log_params, ys);
    } catch (const Error& e) {
      out.rho.reset();
      out.error = e.what();
    }
  };
  run(trend.direction, [&](const std::string& model) {
    if (persona) return effects.delta(model, *persona, dataset);
    std::vector<double> all;
    for (PersonaCondition p : polarity_conditions()) all.push_back(effects.delta(model, p, dataset));
    return mean_of(all);
  });
  run(trend.magnitude,
      [&](const std::string& model) { return sensitivity(effects, model, dataset).value; });
  return trend;
}

}  // namespace persona_lab::metrics
