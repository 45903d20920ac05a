#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace persona_lab::steer {

class SteeringConfig;

enum class Activation : std::uint8_t { Relu, Linear };

std::string activation_tag(Activation a);

/// One fully connected layer: out = act(W * in + b), W stored row-major
/// (out_dim rows of in_dim weights).
struct Layer {
  std::size_t in_dim = 0;
  std::size_t out_dim = 0;
  std::vector<double> weights;
  std::vector<double> bias;
  Activation activation = Activation::Relu;

  double weight(std::size_t row, std::size_t col) const { return weights[row * in_dim + col]; }

  bool operator==(const Layer&) const = default;
};

/// Addresses one hidden unit ("FFN neuron") of a ToyNetwork.
struct NeuronId {
  std::size_t layer = 0;
  std::size_t unit = 0;

  auto operator<=>(const NeuronId&) const = default;
};

struct ForwardResult {
  // Post-nonlinearity (and post-steering) activations of every layer.
  std::vector<std::vector<double>> activations;
  // Activations of the final layer.
  std::vector<double> output;
};

/// Small feed-forward network standing in for the FFN blocks of a language
/// model. Immutable after construction.
class ToyNetwork {
 public:
  /// Throws InvalidInput if dimensions are zero or adjacent layers disagree.
  ToyNetwork(std::size_t input_dim, std::vector<Layer> layers, std::uint64_t seed = 0);

  /// Seeded uniform init of weights and biases in [lo, hi], all layers Relu.
  static ToyNetwork random(std::size_t input_dim, std::span<const std::size_t> hidden_dims,
                           std::uint64_t seed, double lo = -0.5, double hi = 0.5);

  /// Default toy configuration: 2 Relu layers of 64 units.
  static ToyNetwork default_random(std::size_t input_dim, std::uint64_t seed);

  std::size_t input_dim() const { return input_dim_; }
  std::size_t num_layers() const { return layers_.size(); }
  std::size_t layer_width(std::size_t layer) const { return layers_.at(layer).out_dim; }
  std::size_t num_neurons() const;
  const std::vector<Layer>& layers() const { return layers_; }
  std::uint64_t seed() const { return seed_; }

  bool contains(const NeuronId& id) const {
    return id.layer < layers_.size() && id.unit < layers_[id.layer].out_dim;
  }

  bool operator==(const ToyNetwork&) const = default;

 private:
  std::size_t input_dim_;
  std::vector<Layer> layers_;
  std::uint64_t seed_;
};

/// Runs the network on one input. With steering, every hidden activation is
/// passed through apply_steering before feeding the next layer.
///
/// Throws InvalidInput on an input length mismatch and ConfigError when the
/// steering map names neurons outside the network.
ForwardResult forward(const ToyNetwork& network, std::span<const double> input,
                      const SteeringConfig* steering = nullptr);

/// Plain-text serialization:
///
///   persona-lab-network 1 seed=<seed> input=<dim> layers=<w>:<act>,<w>:<act>,...
///
/// followed, per layer, by out_dim lines of in_dim weights (row-major) and one
/// bias line. Reals use the shortest round-trip decimal form.
void write_network(std::ostream& out, const ToyNetwork& network);
std::string serialize_network(const ToyNetwork& network);
ToyNetwork read_network(std::istream& in);
ToyNetwork load_network(const std::string& path);
void save_network(const std::string& path, const ToyNetwork& network);

}  // namespace persona_lab::steer
