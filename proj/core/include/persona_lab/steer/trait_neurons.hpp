#pragma once

#include <iosfwd>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "persona_lab/persona.hpp"
#include "persona_lab/steer/network.hpp"

namespace persona_lab::steer {

using Sample = std::vector<double>;

enum class Membership : char { Positive = '+', Negative = '-' };

struct NeuronScore {
  double delta = 0.0;  // P(fire | high) - P(fire | low), in [-1, 1]
  Membership membership = Membership::Positive;
  double h_ref = 0.0;  // mean strictly-positive activation over the high corpus

  bool operator==(const NeuronScore&) const = default;
};

/// Trait-specific neurons found by contrasting high- and low-trait corpora.
class TraitNeuronMap {
 public:
  TraitNeuronMap(Trait trait, double tau) : trait_(trait), tau_(tau) {}

  /// Throws InvalidArgument if the entry breaks the threshold or sign invariants.
  void insert(NeuronId id, NeuronScore score);

  Trait trait() const { return trait_; }
  double tau() const { return tau_; }
  const std::map<NeuronId, NeuronScore>& neurons() const { return neurons_; }
  const NeuronScore* find(const NeuronId& id) const;

  std::vector<NeuronId> positive_set() const;
  std::vector<NeuronId> negative_set() const;

  bool operator==(const TraitNeuronMap&) const = default;

 private:
  Trait trait_;
  double tau_;
  std::map<NeuronId, NeuronScore> neurons_;
};

/// Inference-time modulation of a trait's neurons. A Low polarity swaps the
/// roles of the positive and negative sets.
class SteeringConfig {
 public:
  /// Throws ConfigError if alpha is negative or not finite.
  SteeringConfig(std::shared_ptr<const TraitNeuronMap> map, Polarity polarity, double alpha);

  Trait trait() const { return map_->trait(); }
  Polarity polarity() const { return polarity_; }
  double alpha() const { return alpha_; }
  const TraitNeuronMap& map() const { return *map_; }

  /// Throws ConfigError when any mapped neuron lies outside the network.
  void validate_for(const ToyNetwork& network) const;

 private:
  std::shared_ptr<const TraitNeuronMap> map_;
  Polarity polarity_;
  double alpha_;
};

/// h + alpha * h_ref for effective-positive neurons, 0 for effective-negative
/// neurons, h otherwise.
double apply_steering(double h, const NeuronId& neuron, const SteeringConfig& config);

/// Fraction of samples on which the neuron's activation is strictly positive.
/// Throws EmptyCorpus for an empty sample list.
double activation_probability(const ToyNetwork& network, std::span<const Sample> samples,
                              const NeuronId& neuron);

/// Per-neuron firing statistics of one corpus; fire_counts[l][u] counts samples
/// with activation > 0 and positive_sums[l][u] sums those activations.
struct FiringTally {
  std::size_t samples = 0;
  std::vector<std::vector<std::size_t>> fire_counts;
  std::vector<std::vector<double>> positive_sums;
};

FiringTally tally_firing(const ToyNetwork& network, std::span<const Sample> samples);

/// delta for every neuron, indexed [layer][unit].
std::vector<std::vector<double>> activation_deltas(const ToyNetwork& network,
                                                   std::span<const Sample> high_samples,
                                                   std::span<const Sample> low_samples);

/// Identification phase: neurons with delta > tau form the positive set,
/// delta < -tau the negative set. Requires tau in (0, 1).
TraitNeuronMap identify_trait_neurons(const ToyNetwork& network, Trait trait,
                                      std::span<const Sample> high_samples,
                                      std::span<const Sample> low_samples, double tau);

/// CSV export, one row per selected neuron:
///   trait,layer,unit,delta,membership,h_ref
/// Trait and tau are carried in a leading "# trait=<code> tau=<value>" line.
void write_neuron_map(std::ostream& out, const TraitNeuronMap& map);
TraitNeuronMap read_neuron_map(std::istream& in);
void save_neuron_map(const std::string& path, const TraitNeuronMap& map);
TraitNeuronMap load_neuron_map(const std::string& path);

/// Whitespace-separated reals, one sample per line; blank lines and '#'
/// comments are skipped.
std::vector<Sample> read_samples(std::istream& in);
std::vector<Sample> load_samples(const std::string& path);
void save_samples(const std::string& path, std::span<const Sample> samples);

}  // namespace persona_lab::steer
