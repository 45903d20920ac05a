#include "persona_lab/metrics/records.hpp"

#include <algorithm>
#include <set>
#include <tuple>

namespace persona_lab::metrics {

bool canonical_less(const ResultRecord& a, const ResultRecord& b) {
  return std::tie(a.model, a.dataset, a.persona, a.item_id, a.correct) <
         std::tie(b.model, b.dataset, b.persona, b.item_id, b.correct);
}

std::string_view domain_tag(DomainGroup g) {
  switch (g) {
    case DomainGroup::InstructionFollowing: return "instruction-following";
    case DomainGroup::Knowledge: return "knowledge";
    case DomainGroup::MultiStepReasoning: return "multi-step-reasoning";
    case DomainGroup::NumericalReasoning: return "numerical-reasoning";
  }
  return "";
}

std::optional<DomainGroup> parse_domain(std::string_view tag) {
  for (DomainGroup g : kDomainGroups) {
    if (domain_tag(g) == tag) return g;
  }
  return std::nullopt;
}

DomainMap DomainMap::defaults() {
  DomainMap map;
  map.set("IFEval", DomainGroup::InstructionFollowing);
  map.set("MMLU-Pro", DomainGroup::Knowledge);
  map.set("GPQA", DomainGroup::Knowledge);
  map.set("BBH", DomainGroup::MultiStepReasoning);
  map.set("MuSR", DomainGroup::MultiStepReasoning);
  map.set("GSM8K", DomainGroup::NumericalReasoning);
  return map;
}

std::optional<DomainGroup> DomainMap::group_of(std::string_view dataset) const {
  auto it = groups_.find(dataset);
  if (it == groups_.end()) return std::nullopt;
  return it->second;
}

std::string_view direction_tag(PredictedDirection d) {
  switch (d) {
    case PredictedDirection::High: return "high";
    case PredictedDirection::Low: return "low";
    case PredictedDirection::TaskDependent: return "task-dependent";
  }
  return "";
}

std::optional<PredictedDirection> parse_direction(std::string_view tag) {
  for (auto d : {PredictedDirection::High, PredictedDirection::Low,
                 PredictedDirection::TaskDependent}) {
    if (direction_tag(d) == tag) return d;
  }
  return std::nullopt;
}

std::vector<HumanHypothesis> default_hypotheses() {
  return {{Trait::A, PredictedDirection::TaskDependent},
          {Trait::C, PredictedDirection::High},
          {Trait::E, PredictedDirection::High},
          {Trait::N, PredictedDirection::Low},
          {Trait::O, PredictedDirection::High}};
}

std::vector<PairedDesignViolation> find_paired_design_violations(
    std::span<const ResultRecord> records) {
  using Block = std::pair<std::string, std::string>;
  std::map<Block, std::map<PersonaCondition, std::set<std::string>>> blocks;
  for (const ResultRecord& r : records) {
    blocks[{r.model, r.dataset}][r.persona].insert(r.item_id);
  }
  std::vector<PairedDesignViolation> out;
  for (const auto& [block, personas] : blocks) {
    std::set<std::string> all_items;
    for (const auto& [p, items] : personas) all_items.insert(items.begin(), items.end());
    std::string detail;
    for (const auto& [p, items] : personas) {
      if (items.size() != all_items.size()) {
        if (!detail.empty()) detail += "; ";
        detail += p.code() + " covers " + std::to_string(items.size()) + " of " +
                  std::to_string(all_items.size()) + " items";
      }
    }
    if (!detail.empty()) out.push_back({block.first, block.second, std::move(detail)});
  }
  return out;
}

std::vector<ResultRecord> find_duplicate_records(std::span<const ResultRecord> records) {
  std::vector<ResultRecord> sorted(records.begin(), records.end());
  std::sort(sorted.begin(), sorted.end(), canonical_less);
  std::vector<ResultRecord> dups;
  for (std::size_t i = 1; i < sorted.size(); ++i) {
    const auto& a = sorted[i - 1];
    const auto& b = sorted[i];
    if (a.model == b.model && a.dataset == b.dataset && a.persona == b.persona &&
        a.item_id == b.item_id) {
      dups.push_back(b);
    }
  }
  return dups;
}

}  // namespace persona_lab::metrics
