#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "persona_lab/dpr/tfidf.hpp"
#include "persona_lab/persona.hpp"

namespace persona_lab::dpr {

/// A benchmark item with the outcome y(x, p) of every persona condition under
/// the designated model.
struct CorpusItem {
  std::string dataset;
  std::string item_id;
  std::string text;
  std::map<PersonaCondition, bool> outcomes;

  bool solved_by(PersonaCondition p) const {
    auto it = outcomes.find(p);
    return it != outcomes.end() && it->second;
  }

  bool operator==(const CorpusItem&) const = default;
};

/// Throws InvalidArgument unless every polarity condition has an outcome.
void check_outcomes(const CorpusItem& item);

/// Size of the test split: floor(n * (1 - ratio)), tolerant of the binary
/// representation error in ratios such as 0.9.
std::size_t test_split_size(std::size_t n, double ratio);

struct Split {
  std::vector<CorpusItem> reference;
  std::vector<CorpusItem> test;
};

/// Sorts by item id, applies a seeded Fisher-Yates shuffle and cuts the
/// shuffled list into reference (prefix) and test (suffix). Throws
/// InvalidArgument for fewer than two items, a ratio outside (0, 1), or a
/// split that leaves either side empty.
Split split_reference_test(std::vector<CorpusItem> items, double ratio, std::uint64_t seed);

/// Best single persona on a set of items (ties go to the canonical order).
struct StaticBest {
  PersonaCondition persona;
  std::size_t solved = 0;
  double accuracy = 0.0;  // fraction
};
StaticBest best_static_persona(std::span<const CorpusItem> items);

/// Reference items, their TF-IDF index and the split that produced them.
class RoutingMemory {
 public:
  static RoutingMemory build(std::vector<CorpusItem> reference, std::uint64_t seed, double ratio,
                             std::vector<std::string> test_ids = {});

  RoutingMemory(std::vector<CorpusItem> reference, TfidfIndex index, std::uint64_t seed,
                double ratio, std::vector<std::string> test_ids);

  const std::string& dataset() const { return reference_.front().dataset; }
  const std::vector<CorpusItem>& reference() const { return reference_; }
  const TfidfIndex& index() const { return index_; }
  std::uint64_t seed() const { return seed_; }
  double ratio() const { return ratio_; }
  const std::vector<std::string>& test_ids() const { return test_ids_; }
  /// Recommendation used when the effective set is empty or retrieval fails.
  PersonaCondition fallback_persona() const { return fallback_; }

  bool operator==(const RoutingMemory& o) const {
    return reference_ == o.reference_ && index_ == o.index_ && seed_ == o.seed_ &&
           ratio_ == o.ratio_ && test_ids_ == o.test_ids_;
  }

 private:
  std::vector<CorpusItem> reference_;
  TfidfIndex index_;
  std::uint64_t seed_;
  double ratio_;
  std::vector<std::string> test_ids_;
  PersonaCondition fallback_;
};

/// Polarity conditions (never BASE) under which the anchor was solved.
/// Throws MissingAnchor for an index outside the reference set.
std::vector<PersonaCondition> effective_persona_set(const RoutingMemory& memory,
                                                    std::size_t anchor);

struct RoutingResult {
  std::string item_id;
  std::string anchor_id;
  double similarity = 0.0;
  std::vector<PersonaCondition> recommended;
  bool hit = false;
  bool fallback = false;
};

/// Retrieves the anchor for one query and scores the recommendation against
/// the query's gold outcomes.
RoutingResult route_item(const RoutingMemory& memory, const CorpusItem& query);

struct RoutingReport {
  std::string dataset;
  std::size_t total = 0;    // reference + test items
  std::size_t sampled = 0;  // test items routed
  std::size_t correct = 0;  // hits
  double accuracy = 0.0;    // percent
  double best_baseline = 0.0;  // percent, best single polarity persona on the test items
  PersonaCondition best_persona;
  std::optional<double> base_accuracy;  // percent, BASE outcomes on the test items
  double oracle_upper_bound = 0.0;      // percent solvable by at least one persona
  std::size_t fallbacks = 0;
  std::vector<RoutingResult> results;  // in test-item order
};

/// Routes every test item. Work is spread over `threads` workers; the report
/// does not depend on the thread count. Throws InvalidArgument for an empty
/// test set.
RoutingReport evaluate_routing(const RoutingMemory& memory, std::span<const CorpusItem> test,
                               unsigned threads = 1);

}  // namespace persona_lab::dpr
