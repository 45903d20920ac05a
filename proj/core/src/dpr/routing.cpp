#include "persona_lab/dpr/routing.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <thread>

#include "persona_lab/error.hpp"
#include "persona_lab/random.hpp"

namespace persona_lab::dpr {

void check_outcomes(const CorpusItem& item) {
  for (PersonaCondition p : polarity_conditions()) {
    if (item.outcomes.count(p) == 0) {
      throw InvalidArgument("item " + item.item_id + " has no outcome for " + p.code());
    }
  }
}

std::size_t test_split_size(std::size_t n, double ratio) {
  const double exact = static_cast<double>(n) * (1.0 - ratio);
  return static_cast<std::size_t>(std::floor(exact + 1e-9));
}

Split split_reference_test(std::vector<CorpusItem> items, double ratio, std::uint64_t seed) {
  if (items.size() < 2) throw InvalidArgument("split needs at least two items");
  if (!(ratio > 0.0 && ratio < 1.0)) throw InvalidArgument("split ratio must lie in (0, 1)");
  const std::size_t n_test = test_split_size(items.size(), ratio);
  if (n_test == 0 || n_test == items.size()) {
    throw InvalidArgument("split of " + std::to_string(items.size()) +
                          " items leaves an empty reference or test set");
  }
  std::sort(items.begin(), items.end(),
            [](const CorpusItem& a, const CorpusItem& b) { return a.item_id < b.item_id; });
  std::mt19937_64 rng(seed);
  seeded_shuffle(items, rng);

  Split split;
  const std::size_t n_ref = items.size() - n_test;
  split.reference.assign(std::make_move_iterator(items.begin()),
                         std::make_move_iterator(items.begin() + static_cast<std::ptrdiff_t>(n_ref)));
  split.test.assign(std::make_move_iterator(items.begin() + static_cast<std::ptrdiff_t>(n_ref)),
                    std::make_move_iterator(items.end()));
  return split;
}

StaticBest best_static_persona(std::span<const CorpusItem> items) {
  if (items.empty()) throw InvalidArgument("best static persona of an empty item set");
  StaticBest best;
  best.persona = polarity_conditions().front();
  bool first = true;
  for (PersonaCondition p : polarity_conditions()) {
    const auto solved = static_cast<std::size_t>(
        std::count_if(items.begin(), items.end(), [&](const CorpusItem& x) { return x.solved_by(p); }));
    if (first || solved > best.solved) {
      best.persona = p;
      best.solved = solved;
      first = false;
    }
  }
  best.accuracy = static_cast<double>(best.solved) / static_cast<double>(items.size());
  return best;
}

RoutingMemory RoutingMemory::build(std::vector<CorpusItem> reference, std::uint64_t seed,
                                   double ratio, std::vector<std::string> test_ids) {
  if (reference.empty()) throw InvalidArgument("routing memory needs reference items");
  std::vector<std::string> texts;
  texts.reserve(reference.size());
  for (const CorpusItem& item : reference) texts.push_back(item.text);
  TfidfIndex index = TfidfIndex::build(texts);
  return RoutingMemory(std::move(reference), std::move(index), seed, ratio, std::move(test_ids));
}

RoutingMemory::RoutingMemory(std::vector<CorpusItem> reference, TfidfIndex index,
                             std::uint64_t seed, double ratio, std::vector<std::string> test_ids)
    : reference_(std::move(reference)),
      index_(std::move(index)),
      seed_(seed),
      ratio_(ratio),
      test_ids_(std::move(test_ids)) {
  if (reference_.empty()) throw InvalidArgument("routing memory needs reference items");
  if (index_.num_documents() != reference_.size()) {
    throw InvalidArgument("index document count differs from reference set size");
  }
  for (const CorpusItem& item : reference_) {
    if (item.dataset != reference_.front().dataset) {
      throw InvalidArgument("routing memory mixes datasets " + reference_.front().dataset +
                            " and " + item.dataset);
    }
    check_outcomes(item);
  }
  std::vector<std::string> ids;
  for (const CorpusItem& item : reference_) ids.push_back(item.item_id);
  std::sort(ids.begin(), ids.end());
  if (std::adjacent_find(ids.begin(), ids.end()) != ids.end()) {
    throw InvalidArgument("duplicate item id in reference set");
  }
  for (const std::string& t : test_ids_) {
    if (std::binary_search(ids.begin(), ids.end(), t)) {
      throw InvalidArgument("item " + t + " is in both the reference and test sets");
    }
  }
  fallback_ = best_static_persona(reference_).persona;
}

std::vector<PersonaCondition> effective_persona_set(const RoutingMemory& memory,
                                                    std::size_t anchor) {
  if (anchor >= memory.reference().size()) {
    throw MissingAnchor("anchor " + std::to_string(anchor) + " is not in the reference set");
  }
  const CorpusItem& item = memory.reference()[anchor];
  std::vector<PersonaCondition> out;
  for (PersonaCondition p : polarity_conditions()) {
    if (item.solved_by(p)) out.push_back(p);
  }
  return out;
}

RoutingResult route_item(const RoutingMemory& memory, const CorpusItem& query) {
  const AnchorMatch match = memory.index().nearest(query.text);
  RoutingResult r;
  r.item_id = query.item_id;
  r.anchor_id = memory.reference()[match.document].item_id;
  r.similarity = match.score;
  if (!match.fallback) r.recommended = effective_persona_set(memory, match.document);
  if (r.recommended.empty()) {
    r.recommended = {memory.fallback_persona()};
    r.fallback = true;
  }
  r.hit = std::any_of(r.recommended.begin(), r.recommended.end(),
                      [&](PersonaCondition p) { return query.solved_by(p); });
  return r;
}

RoutingReport evaluate_routing(const RoutingMemory& memory, std::span<const CorpusItem> test,
                               unsigned threads) {
  if (test.empty()) throw InvalidArgument("routing evaluation needs test items");
  for (const CorpusItem& item : test) check_outcomes(item);

  RoutingReport report;
  report.dataset = memory.dataset();
  report.sampled = test.size();
  report.total = memory.reference().size() + test.size();
  report.results.resize(test.size());

  const std::size_t workers = std::clamp<std::size_t>(threads, 1, test.size());
  if (workers == 1) {
    for (std::size_t i = 0; i < test.size(); ++i) report.results[i] = route_item(memory, test[i]);
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        for (std::size_t i = w; i < test.size(); i += workers) {
          report.results[i] = route_item(memory, test[i]);
        }
      });
    }
  }

  const auto n = static_cast<double>(test.size());
  for (const RoutingResult& r : report.results) {
    if (r.hit) ++report.correct;
    if (r.fallback) ++report.fallbacks;
  }
  report.accuracy = 100.0 * static_cast<double>(report.correct) / n;

  const StaticBest best = best_static_persona(test);
  report.best_persona = best.persona;
  report.best_baseline = 100.0 * best.accuracy;

  const bool has_base = std::all_of(test.begin(), test.end(), [](const CorpusItem& x) {
    return x.outcomes.count(PersonaCondition::baseline()) != 0;
  });
  if (has_base) {
    const auto solved = std::count_if(test.begin(), test.end(), [](const CorpusItem& x) {
      return x.solved_by(PersonaCondition::baseline());
    });
    report.base_accuracy = 100.0 * static_cast<double>(solved) / n;
  }

  const auto solvable = std::count_if(test.begin(), test.end(), [](const CorpusItem& x) {
    const auto ps = polarity_conditions();
    return std::any_of(ps.begin(), ps.end(), [&](PersonaCondition p) { return x.solved_by(p); });
  });
  report.oracle_upper_bound = 100.0 * static_cast<double>(solvable) / n;
  return report;
}

}  // namespace persona_lab::dpr
