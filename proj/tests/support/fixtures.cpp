#include "fixtures.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <unistd.h>

#include "persona_lab/random.hpp"

namespace persona_lab::testkit {

namespace fs = std::filesystem;

namespace {

constexpr std::size_t kSignal = 4;
constexpr std::size_t kWeak = 4;
constexpr std::size_t kNoise = 8;
constexpr std::size_t kInput = kSignal + kWeak + kNoise;
constexpr std::size_t kWidth0 = 24;
constexpr std::size_t kWidth1 = 16;

std::vector<std::size_t> pick_distinct(std::mt19937_64& rng, std::size_t n, std::size_t k) {
  std::vector<std::size_t> all(n);
  for (std::size_t i = 0; i < n; ++i) all[i] = i;
  seeded_shuffle(all, rng);
  all.resize(k);
  std::sort(all.begin(), all.end());
  return all;
}

}  // namespace

PlantedFixture make_planted_fixture(std::uint64_t seed, std::size_t samples,
                                    double max_background_delta) {
  std::mt19937_64 rng(seed);

  // Corpora. Coordinates: [0, kSignal) signal, then weak, then noise.
  const auto weak_pairs = static_cast<std::size_t>(max_background_delta * static_cast<double>(samples) + 1e-9);
  const std::size_t differing = uniform_index(rng, weak_pairs + 1);
  auto differ = pick_distinct(rng, samples, differing);
  std::vector<bool> differs(samples, false);
  for (auto i : differ) differs[i] = true;

  std::vector<steer::Sample> high(samples, steer::Sample(kInput));
  std::vector<steer::Sample> low(samples, steer::Sample(kInput));
  for (std::size_t i = 0; i < samples; ++i) {
    for (std::size_t j = 0; j < kSignal; ++j) {
      high[i][j] = uniform_real(rng, 0.5, 1.5);
      low[i][j] = -uniform_real(rng, 0.5, 1.5);
    }
    for (std::size_t j = kSignal; j < kSignal + kWeak; ++j) {
      high[i][j] = uniform_real(rng, -1.0, 1.0);
      low[i][j] = differs[i] ? uniform_real(rng, -1.0, 1.0) : high[i][j];
    }
    for (std::size_t j = kSignal + kWeak; j < kInput; ++j) {
      high[i][j] = low[i][j] = uniform_real(rng, -1.0, 1.0);
    }
  }

  PlantedFixture fx{steer::ToyNetwork(1, {steer::Layer{1, 1, {1.0}, {0.0}, steer::Activation::Relu}}),
                    std::move(high), std::move(low), {}, {}, max_background_delta};

  // Layer 0.
  steer::Layer l0{kInput, kWidth0, std::vector<double>(kInput * kWidth0, 0.0),
                  std::vector<double>(kWidth0, 0.0), steer::Activation::Relu};
  const auto planted0 = pick_distinct(rng, kWidth0, 2 + uniform_index(rng, 5));
  std::vector<bool> is_planted0(kWidth0, false);
  std::vector<int> sign0(kWidth0, 0);
  for (auto u : planted0) {
    is_planted0[u] = true;
    sign0[u] = uniform_index(rng, 2) ? 1 : -1;
    l0.weights[u * kInput + uniform_index(rng, kSignal)] = sign0[u];
    // |noise contribution| <= 8 * 0.05 < 0.5 <= |signal|.
    for (std::size_t j = kSignal + kWeak; j < kInput; ++j) {
      l0.weights[u * kInput + j] = uniform_real(rng, -0.05, 0.05);
    }
    (sign0[u] > 0 ? fx.positive : fx.negative).insert({0, u});
  }
  for (std::size_t u = 0; u < kWidth0; ++u) {
    if (is_planted0[u]) continue;
    for (std::size_t j = kSignal; j < kInput; ++j) l0.weights[u * kInput + j] = uniform_real(rng, -1.0, 1.0);
    l0.bias[u] = uniform_real(rng, -0.5, 0.5);
  }

  // Layer 1.
  steer::Layer l1{kWidth0, kWidth1, std::vector<double>(kWidth0 * kWidth1, 0.0),
                  std::vector<double>(kWidth1, 0.0), steer::Activation::Relu};
  const auto planted1 = pick_distinct(rng, kWidth1, 1 + uniform_index(rng, 4));
  std::vector<bool> is_planted1(kWidth1, false);
  for (auto u : planted1) {
    is_planted1[u] = true;
    const std::size_t source = planted0[uniform_index(rng, planted0.size())];
    l1.weights[u * kWidth0 + source] = uniform_real(rng, 0.5, 1.5);
    (sign0[source] > 0 ? fx.positive : fx.negative).insert({1, u});
  }
  for (std::size_t u = 0; u < kWidth1; ++u) {
    if (is_planted1[u]) continue;
    for (std::size_t j = 0; j < kWidth0; ++j) {
      if (!is_planted0[j]) l1.weights[u * kWidth0 + j] = uniform_real(rng, -1.0, 1.0);
    }
    l1.bias[u] = uniform_real(rng, -0.5, 0.5);
  }

  fx.network = steer::ToyNetwork(kInput, {std::move(l0), std::move(l1)}, seed);
  return fx;
}

std::vector<steer::Sample> random_samples(std::mt19937_64& rng, std::size_t n, std::size_t dim,
                                          double lo, double hi) {
  std::vector<steer::Sample> out(n, steer::Sample(dim));
  for (auto& s : out) {
    for (auto& v : s) v = uniform_real(rng, lo, hi);
  }
  return out;
}

std::vector<PersonaCondition> cluster_personas() {
  return {PersonaCondition::of(Trait::O, Polarity::High), PersonaCondition::of(Trait::C, Polarity::High),
          PersonaCondition::of(Trait::E, Polarity::Low), PersonaCondition::of(Trait::A, Polarity::High),
          PersonaCondition::of(Trait::N, Polarity::Low)};
}

std::vector<dpr::CorpusItem> make_cluster_corpus(std::uint64_t seed, std::size_t per_cluster,
                                                 const std::string& dataset) {
  static const char* const kStems[] = {"orbit", "ledger", "enzyme", "sonnet", "torque"};
  static const char* const kCommon[] = {"which", "the", "following", "is", "correct", "answer", "of"};
  constexpr std::size_t kVocab = 40;
  const auto personas = cluster_personas();

  std::mt19937_64 rng(seed);
  std::vector<dpr::CorpusItem> items;
  const std::size_t n = per_cluster * 5;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t cluster = i % 5;
    std::vector<std::string> words;
    for (int k = 0; k < 8; ++k) {
      words.push_back(std::string(kStems[cluster]) + std::to_string(uniform_index(rng, kVocab)));
    }
    for (int k = 0; k < 3; ++k) words.emplace_back(kCommon[uniform_index(rng, std::size(kCommon))]);
    seeded_shuffle(words, rng);
    std::string text;
    for (const auto& w : words) text += (text.empty() ? "" : " ") + w;

    dpr::CorpusItem item;
    item.dataset = dataset;
    char id[16];
    std::snprintf(id, sizeof id, "q%04zu", i);
    item.item_id = id;
    item.text = text;
    for (auto p : all_conditions()) item.outcomes[p] = p == personas[cluster];
    items.push_back(std::move(item));
  }
  return items;
}

RandomGrid make_random_grid(std::mt19937_64& rng, std::size_t max_models, std::size_t max_datasets,
                            std::size_t max_items) {
  RandomGrid g;
  const std::size_t nm = 1 + uniform_index(rng, max_models);
  const std::size_t nd = 1 + uniform_index(rng, max_datasets);
  for (std::size_t m = 0; m < nm; ++m) g.models.push_back("m" + std::to_string(m));
  for (std::size_t d = 0; d < nd; ++d) g.datasets.push_back("d" + std::to_string(d));
  for (const auto& m : g.models) {
    for (const auto& d : g.datasets) {
      const std::size_t items = 1 + uniform_index(rng, max_items);
      for (auto p : all_conditions()) {
        // Some baselines score zero so relative effects go undefined.
        double rate = uniform01(rng);
        if (p.is_baseline() && uniform_index(rng, 10) == 0) rate = 0.0;
        for (std::size_t k = 0; k < items; ++k) {
          g.records.push_back({m, p, d, "i" + std::to_string(k), uniform01(rng) < rate});
        }
      }
    }
  }
  return g;
}

ingest::StudyBundle make_study_bundle(std::uint64_t seed, std::size_t items) {
  std::mt19937_64 rng(seed);
  ingest::StudyBundle b;
  b.models = {{"gemma-2-9b", 9, "gemma", true},   {"llama-3.1-8b", 8, "llama", true},
              {"mistral-7b", 7, "mistral", true}, {"qwen2.5-0.5b", 0.5, "qwen", false},
              {"qwen2.5-1.5b", 1.5, "qwen", false}, {"qwen2.5-14b", 14, "qwen", false},
              {"qwen2.5-3b", 3, "qwen", false},   {"qwen2.5-7b", 7, "qwen", true}};
  const std::vector<std::string> datasets{"BBH", "GPQA", "GSM8K", "IFEval", "MMLU-Pro", "MuSR"};
  for (const auto& m : b.models) {
    for (const auto& d : datasets) {
      const double base = uniform_real(rng, 0.2, 0.8);
      for (auto p : all_conditions()) {
        const double rate = p.is_baseline() ? base : std::clamp(base + uniform_real(rng, -0.2, 0.2), 0.0, 1.0);
        for (std::size_t k = 0; k < items; ++k) {
          char id[16];
          std::snprintf(id, sizeof id, "%s-%03zu", d.c_str(), k);
          b.records.push_back({m.name, p, d, id, uniform01(rng) < rate});
        }
      }
    }
  }
  std::sort(b.records.begin(), b.records.end(), metrics::canonical_less);
  for (auto t : {Trait::O, Trait::C, Trait::E, Trait::N}) {
    for (const auto& d : datasets) b.config.comparisons.push_back({t, d});
  }
  return b;
}

void write_file(const std::string& path, const std::string& text) {
  const fs::path p(path);
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string fresh_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("persona_lab_" + std::to_string(::getpid())) / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir.string();
}

}  // namespace persona_lab::testkit
