#include "persona_lab/ingest/study_reports.hpp"

#include <algorithm>
#include <map>

#include "persona_lab/error.hpp"
#include "persona_lab/format.hpp"
#include "persona_lab/metrics/dominance.hpp"

namespace persona_lab::ingest {

using metrics::AccuracyTable;
using metrics::EffectMatrix;

namespace {

template <typename F>
Cell try_cell(F&& f) {
  try {
    return f();
  } catch (const MissingCell&) {
    return Cell::empty();
  } catch (const EmptyAggregate&) {
    return Cell::empty();
  }
}

ReportTable persona_matrix(std::string name, const std::vector<std::string>& datasets) {
  ReportTable t;
  t.name = std::move(name);
  t.columns.push_back("persona");
  t.columns.insert(t.columns.end(), datasets.begin(), datasets.end());
  return t;
}

}  // namespace

std::vector<ReportTable> rq1_reports(const StudyBundle& bundle) {
  const auto subset = bundle.arch_subset();
  if (subset.empty()) throw InvalidArgument("no model is flagged as part of the cross-architecture subset");
  const auto table = AccuracyTable::from_records(bundle.records);
  const auto effects = EffectMatrix::from_table(table);
  const auto datasets = effects.datasets();

  ReportTable mean = persona_matrix("rq1_mean_delta", datasets);
  ReportTable sa = persona_matrix("rq1_direction_consistency", datasets);
  for (PersonaCondition p : polarity_conditions()) {
    std::vector<Cell> mrow{Cell::text(p.code())};
    std::vector<Cell> srow{Cell::text(p.code())};
    for (const std::string& d : datasets) {
      mrow.push_back(try_cell([&] { return Cell::percent(metrics::mean_effect_cross_arch(effects, subset, p, d)); }));
      srow.push_back(try_cell([&] { return Cell::fraction(metrics::direction_consistency(effects, subset, p, d)); }));
    }
    mean.rows.push_back(std::move(mrow));
    sa.rows.push_back(std::move(srow));
  }
  return {std::move(mean), std::move(sa)};
}

std::vector<ReportTable> rq2_reports(const StudyBundle& bundle) {
  const auto table = AccuracyTable::from_records(bundle.records);
  const auto effects = EffectMatrix::from_table(table);
  const auto datasets = effects.datasets();

  ReportTable sens;
  sens.name = "rq2_sensitivity";
  sens.columns = {"model", "family", "params_b", "dataset", "sensitivity", "included", "skipped"};
  std::vector<metrics::ModelSpec> models = bundle.models;
  std::sort(models.begin(), models.end(), [](const auto& a, const auto& b) {
    return std::tie(a.family, a.params_b, a.name) < std::tie(b.family, b.params_b, b.name);
  });
  for (const auto& m : models) {
    for (const std::string& d : datasets) {
      bool has_cells = false;
      for (PersonaCondition p : polarity_conditions()) has_cells = has_cells || effects.has(m.name, p, d);
      if (!has_cells) continue;
      std::vector<Cell> row{Cell::text(m.name), Cell::text(m.family), Cell::real(m.params_b), Cell::text(d)};
      try {
        auto s = metrics::sensitivity(effects, m.name, d);
        row.push_back(Cell::fraction(s.value));
        row.push_back(Cell::integer(static_cast<long long>(s.included)));
        row.push_back(Cell::integer(static_cast<long long>(s.skipped)));
      } catch (const EmptyAggregate&) {
        row.push_back(Cell::empty());
        row.push_back(Cell::integer(0));
        row.push_back(Cell::integer(10));
      } catch (const MissingCell&) {
        row.push_back(Cell::empty());
        row.push_back(Cell::empty());
        row.push_back(Cell::empty());
      }
      sens.rows.push_back(std::move(row));
    }
  }

  ReportTable trends;
  trends.name = "rq2_scaling_trends";
  trends.columns = {"family", "dataset", "persona", "rho_dir", "rho_mag", "note"};
  std::map<std::string, std::vector<metrics::ModelSpec>> families;
  for (const auto& m : bundle.models) families[m.family].push_back(m);
  for (const auto& [family, members] : families) {
    if (members.size() < 3) continue;
    for (const std::string& d : datasets) {
      std::vector<std::optional<PersonaCondition>> targets{std::nullopt};
      for (PersonaCondition p : polarity_conditions()) targets.emplace_back(p);
      for (const auto& target : targets) {
        std::vector<Cell> row{Cell::text(family), Cell::text(d),
                              Cell::text(target ? target->code() : "ALL")};
        try {
          auto t = metrics::scaling_trends(effects, members, target, d);
          row.push_back(Cell::fraction_or_empty(t.direction.rho));
          row.push_back(Cell::fraction_or_empty(t.magnitude.rho));
          std::string note;
          if (!t.direction.rho) note += "rho_dir: " + t.direction.error;
          if (!t.magnitude.rho) note += std::string(note.empty() ? "" : "; ") + "rho_mag: " + t.magnitude.error;
          row.push_back(Cell::text(note));
        } catch (const InvalidArgument& e) {
          row.push_back(Cell::empty());
          row.push_back(Cell::empty());
          row.push_back(Cell::text(e.what()));
        }
        trends.rows.push_back(std::move(row));
      }
    }
  }

  ReportTable domains;
  domains.name = "rq2_domain_effects";
  domains.columns = {"persona"};
  for (auto g : metrics::kDomainGroups) domains.columns.emplace_back(metrics::domain_tag(g));
  for (PersonaCondition p : polarity_conditions()) {
    std::vector<Cell> row{Cell::text(p.code())};
    for (auto g : metrics::kDomainGroups) {
      row.push_back(try_cell([&] {
        return Cell::percent(metrics::domain_aggregate(effects, bundle.config.domains, p, g));
      }));
    }
    domains.rows.push_back(std::move(row));
  }
  return {std::move(sens), std::move(trends), std::move(domains)};
}

ReportTable trait_dominance_table(const AccuracyTable& table) {
  std::vector<metrics::TraitDominance> dom;
  for (Trait t : kTraits) dom.push_back(metrics::trait_dominance(table, t));
  std::vector<double> uni;
  for (const auto& d : dom) uni.push_back(d.uniformity);
  const auto ranks = metrics::competition_ranks(uni);

  std::vector<std::size_t> order(dom.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return ranks[a] < ranks[b];
  });

  ReportTable out;
  out.name = "rq3_trait_dominance";
  out.columns = {"Trait", "Impact", "AvgGap", "Uniformity", "Rank"};
  for (std::size_t i : order) {
    out.rows.push_back({Cell::text(std::string(1, trait_code(dom[i].trait))),
                        Cell::percent(dom[i].impact), Cell::percent(dom[i].avg_gap),
                        Cell::fraction(dom[i].uniformity), Cell::integer(ranks[i])});
  }
  return out;
}

std::vector<ReportTable> rq3_reports(const StudyBundle& bundle) {
  return {trait_dominance_table(AccuracyTable::from_records(bundle.records))};
}

std::vector<ReportTable> rq4_reports(const StudyBundle& bundle) {
  ReportTable summary;
  summary.name = "rq4_consistency";
  summary.columns = {"Trait", "Matches", "Total", "Rate"};
  ReportTable detail;
  detail.name = "rq4_comparisons";
  detail.columns = {"Trait", "Dataset", "MeanGap", "Predicted", "Match"};

  const auto& comparisons = bundle.config.comparisons;
  if (comparisons.empty()) {
    summary.rows.push_back({Cell::text("ALL"), Cell::integer(0), Cell::integer(0), Cell::empty()});
    return {std::move(summary), std::move(detail)};
  }
  const auto table = AccuracyTable::from_records(bundle.records);
  const auto report = metrics::human_consistency(table, bundle.config.hypotheses, comparisons);
  for (Trait t : kTraits) {
    const auto& per = report.per_trait[static_cast<std::size_t>(t)];
    if (per.total == 0) continue;
    summary.rows.push_back({Cell::text(std::string(1, trait_code(t))),
                            Cell::integer(static_cast<long long>(per.matches)),
                            Cell::integer(static_cast<long long>(per.total)),
                            Cell::percent(100.0 * per.rate())});
  }
  summary.rows.push_back({Cell::text("ALL"), Cell::integer(static_cast<long long>(report.matches)),
                          Cell::integer(static_cast<long long>(report.total)),
                          Cell::percent(100.0 * report.rate)});
  for (const auto& o : report.outcomes) {
    detail.rows.push_back({Cell::text(std::string(1, trait_code(o.comparison.trait))),
                           Cell::text(o.comparison.dataset), Cell::percent(o.mean_gap),
                           Cell::text(std::string(metrics::direction_tag(o.predicted))),
                           Cell::integer(o.match ? 1 : 0)});
  }
  return {std::move(summary), std::move(detail)};
}

ReportTable routing_report_table(const dpr::RoutingReport& report) {
  ReportTable t;
  t.name = "routing_report_" + report.dataset;
  t.columns = {"item_id", "anchor_id", "similarity", "recommended_set", "hit", "fallback"};
  for (const auto& r : report.results) {
    std::string set;
    for (PersonaCondition p : r.recommended) set += (set.empty() ? "" : ";") + p.code();
    t.rows.push_back({Cell::text(r.item_id), Cell::text(r.anchor_id), Cell::fraction(r.similarity),
                      Cell::text(set), Cell::integer(r.hit ? 1 : 0), Cell::integer(r.fallback ? 1 : 0)});
  }
  return t;
}

nlohmann::ordered_json routing_summary_json(std::span<const dpr::RoutingReport> reports) {
  nlohmann::ordered_json doc = nlohmann::ordered_json::object();
  for (const auto& r : reports) {
    nlohmann::ordered_json row;
    row["Total"] = r.total;
    row["Sampled"] = r.sampled;
    row["Correct"] = r.correct;
    row["Accuracy"] = Cell::percent(r.accuracy).to_json();
    row["BestBaseline"] = Cell::percent(r.best_baseline).to_json();
    doc[r.dataset] = std::move(row);
  }
  return doc;
}

nlohmann::ordered_json routing_details_json(std::span<const dpr::RoutingReport> reports) {
  nlohmann::ordered_json doc = nlohmann::ordered_json::object();
  for (const auto& r : reports) {
    nlohmann::ordered_json row;
    row["best_persona"] = r.best_persona.code();
    row["best_persona_accuracy"] = Cell::percent(r.best_baseline).to_json();
    row["base_accuracy"] = Cell::percent_or_empty(r.base_accuracy).to_json();
    row["oracle_upper_bound"] = Cell::percent(r.oracle_upper_bound).to_json();
    row["fallbacks"] = r.fallbacks;
    doc[r.dataset] = std::move(row);
  }
  return doc;
}

}  // namespace persona_lab::ingest
