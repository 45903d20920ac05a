#pragma once

#include <cstdint>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "persona_lab/dpr/routing.hpp"
#include "persona_lab/ingest/bundle.hpp"
#include "persona_lab/metrics/records.hpp"
#include "persona_lab/steer/network.hpp"
#include "persona_lab/steer/trait_neurons.hpp"

namespace persona_lab::testkit {

// Network plus high/low corpora in which a known neuron set has delta = +1 or
// -1 and every other neuron has |delta| <= max_background_delta.
//
// Layer-0 planted units read one signal coordinate (+1 in every high sample,
// -1 in every low sample, scaled) with weight +-1 plus small noise weights
// that can never flip the sign. Layer-1 planted units copy a planted layer-0
// unit. Background units only see noise and weak coordinates; sample i of the
// high corpus and sample i of the low corpus share their noise, and weak
// coordinates differ on at most max_background_delta * n pairs, so background
// firing can differ on at most that many pairs.
struct PlantedFixture {
  steer::ToyNetwork network;
  std::vector<steer::Sample> high;
  std::vector<steer::Sample> low;
  std::set<steer::NeuronId> positive;
  std::set<steer::NeuronId> negative;
  double max_background_delta = 0.0;
};

PlantedFixture make_planted_fixture(std::uint64_t seed, std::size_t samples = 100,
                                    double max_background_delta = 0.2);

// Random samples with coordinates uniform in [lo, hi].
std::vector<steer::Sample> random_samples(std::mt19937_64& rng, std::size_t n, std::size_t dim,
                                          double lo = -1.0, double hi = 1.0);

// Five topic clusters of `per_cluster` items; cluster c has its own
// vocabulary and is solved only under cluster_personas()[c].
std::vector<PersonaCondition> cluster_personas();
std::vector<dpr::CorpusItem> make_cluster_corpus(std::uint64_t seed, std::size_t per_cluster = 100,
                                                 const std::string& dataset = "synthetic");

// Random paired-design study: every persona condition of a (model, dataset)
// block covers the same items.
struct RandomGrid {
  std::vector<std::string> models;
  std::vector<std::string> datasets;
  std::vector<metrics::ResultRecord> records;
};

RandomGrid make_random_grid(std::mt19937_64& rng, std::size_t max_models = 5,
                            std::size_t max_datasets = 6, std::size_t max_items = 50);

// Four comparable-scale architectures (arch subset) and a five-scale family
// over the six default datasets, with comparisons for every directional trait.
ingest::StudyBundle make_study_bundle(std::uint64_t seed, std::size_t items = 20);

// Writes `text` to `path`, creating parent directories.
void write_file(const std::string& path, const std::string& text);
std::string read_file(const std::string& path);

// Fresh empty directory under the system temp dir.
std::string fresh_dir(const std::string& name);

}  // namespace persona_lab::testkit
