#pragma once

#include <compare>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "persona_lab/persona.hpp"

namespace persona_lab::metrics {

/// One scored benchmark item: the atom every metric is computed from.
struct ResultRecord {
  std::string model;
  PersonaCondition persona;
  std::string dataset;
  std::string item_id;
  bool correct = false;

  auto operator<=>(const ResultRecord&) const = default;
};

/// Canonical record order: model, dataset, persona, item.
bool canonical_less(const ResultRecord& a, const ResultRecord& b);

struct ModelSpec {
  std::string name;
  double params_b = 0.0;  // billions of parameters
  std::string family;
  bool arch_subset = false;  // member of the comparable-scale cross-architecture set

  bool operator==(const ModelSpec&) const = default;
};

enum class DomainGroup { InstructionFollowing, Knowledge, MultiStepReasoning, NumericalReasoning };

inline constexpr DomainGroup kDomainGroups[] = {
    DomainGroup::InstructionFollowing, DomainGroup::Knowledge, DomainGroup::MultiStepReasoning,
    DomainGroup::NumericalReasoning};

std::string_view domain_tag(DomainGroup g);
std::optional<DomainGroup> parse_domain(std::string_view tag);

class DomainMap {
 public:
  /// IFEval, MMLU-Pro, GPQA, BBH, MuSR, GSM8K mapped to their groups.
  static DomainMap defaults();

  void set(std::string dataset, DomainGroup group) { groups_[std::move(dataset)] = group; }
  std::optional<DomainGroup> group_of(std::string_view dataset) const;
  const std::map<std::string, DomainGroup, std::less<>>& entries() const { return groups_; }

  bool operator==(const DomainMap&) const = default;

 private:
  std::map<std::string, DomainGroup, std::less<>> groups_;
};

enum class PredictedDirection { High, Low, TaskDependent };

std::string_view direction_tag(PredictedDirection d);
std::optional<PredictedDirection> parse_direction(std::string_view tag);

struct HumanHypothesis {
  Trait trait;
  PredictedDirection predicted;

  bool operator==(const HumanHypothesis&) const = default;
};

/// O, C, E favour high; N favours low; A is task-dependent.
std::vector<HumanHypothesis> default_hypotheses();

/// One trait-benchmark pair scored for human-LLM directional agreement.
struct TraitComparison {
  Trait trait;
  std::string dataset;

  bool operator==(const TraitComparison&) const = default;
};

struct PairedDesignViolation {
  std::string model;
  std::string dataset;
  std::string detail;
};

/// Within every (model, dataset) block, all persona conditions present must
/// cover the same item ids. Returns one entry per offending block.
std::vector<PairedDesignViolation> find_paired_design_violations(
    std::span<const ResultRecord> records);

/// Keys (model, persona, dataset, item) that occur more than once.
std::vector<ResultRecord> find_duplicate_records(std::span<const ResultRecord> records);

}  // namespace persona_lab::metrics
