#include "persona_lab/steer/network.hpp"

#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "persona_lab/error.hpp"
#include "persona_lab/format.hpp"
#include "persona_lab/random.hpp"
#include "persona_lab/steer/trait_neurons.hpp"

namespace persona_lab::steer {

namespace {

constexpr std::string_view kMagic = "persona-lab-network";
constexpr int kFormatVersion = 1;

Activation parse_activation(std::string_view tag) {
  if (tag == "relu") return Activation::Relu;
  if (tag == "linear") return Activation::Linear;
  throw ParseError("unknown activation tag '" + std::string(tag) + "'");
}

std::string_view strip_key(std::string_view token, std::string_view key) {
  if (token.substr(0, key.size()) != key) {
    throw ParseError("network header: expected '" + std::string(key) + "'");
  }
  return token.substr(key.size());
}

}  // namespace

std::string activation_tag(Activation a) { return a == Activation::Relu ? "relu" : "linear"; }

ToyNetwork::ToyNetwork(std::size_t input_dim, std::vector<Layer> layers, std::uint64_t seed)
    : input_dim_(input_dim), layers_(std::move(layers)), seed_(seed) {
  if (input_dim_ == 0) throw InvalidInput("network input dimension must be positive");
  if (layers_.empty()) throw InvalidInput("network needs at least one layer");
  std::size_t prev = input_dim_;
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    const Layer& layer = layers_[l];
    if (layer.out_dim == 0) throw InvalidInput("layer " + std::to_string(l) + " has zero width");
    if (layer.in_dim != prev) {
      throw InvalidInput("layer " + std::to_string(l) + " expects input of " +
                         std::to_string(layer.in_dim) + " but previous width is " +
                         std::to_string(prev));
    }
    if (layer.weights.size() != layer.in_dim * layer.out_dim || layer.bias.size() != layer.out_dim) {
      throw InvalidInput("layer " + std::to_string(l) + " parameter shape mismatch");
    }
    prev = layer.out_dim;
  }
}

ToyNetwork ToyNetwork::random(std::size_t input_dim, std::span<const std::size_t> hidden_dims,
                              std::uint64_t seed, double lo, double hi) {
  std::mt19937_64 rng(seed);
  std::vector<Layer> layers;
  std::size_t prev = input_dim;
  for (std::size_t width : hidden_dims) {
    Layer layer{prev, width, std::vector<double>(prev * width), std::vector<double>(width),
                Activation::Relu};
    for (double& w : layer.weights) w = uniform_real(rng, lo, hi);
    for (double& b : layer.bias) b = uniform_real(rng, lo, hi);
    layers.push_back(std::move(layer));
    prev = width;
  }
  return ToyNetwork(input_dim, std::move(layers), seed);
}

ToyNetwork ToyNetwork::default_random(std::size_t input_dim, std::uint64_t seed) {
  constexpr std::size_t dims[] = {64, 64};
  return random(input_dim, dims, seed);
}

std::size_t ToyNetwork::num_neurons() const {
  std::size_t n = 0;
  for (const Layer& layer : layers_) n += layer.out_dim;
  return n;
}

ForwardResult forward(const ToyNetwork& network, std::span<const double> input,
                      const SteeringConfig* steering) {
  if (input.size() != network.input_dim()) {
    throw InvalidInput("input has " + std::to_string(input.size()) + " values, network expects " +
                       std::to_string(network.input_dim()));
  }
  if (steering != nullptr) steering->validate_for(network);

  ForwardResult result;
  result.activations.reserve(network.num_layers());
  std::span<const double> x = input;
  for (std::size_t l = 0; l < network.num_layers(); ++l) {
    const Layer& layer = network.layers()[l];
    std::vector<double> h(layer.out_dim);
    for (std::size_t r = 0; r < layer.out_dim; ++r) {
      double acc = layer.bias[r];
      const double* row = layer.weights.data() + r * layer.in_dim;
      for (std::size_t c = 0; c < layer.in_dim; ++c) acc += row[c] * x[c];
      if (layer.activation == Activation::Relu && !(acc > 0.0)) acc = 0.0;
      h[r] = steering != nullptr ? apply_steering(acc, NeuronId{l, r}, *steering) : acc;
    }
    result.activations.push_back(std::move(h));
    x = result.activations.back();
  }
  result.output = result.activations.back();
  return result;
}

void write_network(std::ostream& out, const ToyNetwork& network) {
  out << kMagic << ' ' << kFormatVersion << " seed=" << network.seed()
      << " input=" << network.input_dim() << " layers=";
  for (std::size_t l = 0; l < network.num_layers(); ++l) {
    const Layer& layer = network.layers()[l];
    out << (l ? "," : "") << layer.out_dim << ':' << activation_tag(layer.activation);
  }
  out << '\n';
  for (const Layer& layer : network.layers()) {
    for (std::size_t r = 0; r < layer.out_dim; ++r) {
      for (std::size_t c = 0; c < layer.in_dim; ++c) {
        out << (c ? " " : "") << format_shortest(layer.weight(r, c));
      }
      out << '\n';
    }
    for (std::size_t r = 0; r < layer.out_dim; ++r) {
      out << (r ? " " : "") << format_shortest(layer.bias[r]);
    }
    out << '\n';
  }
}

std::string serialize_network(const ToyNetwork& network) {
  std::ostringstream out;
  write_network(out, network);
  return out.str();
}

ToyNetwork read_network(std::istream& in) {
  std::string header;
  if (!std::getline(in, header)) throw ParseError("empty network file");
  std::istringstream hs(header);
  std::string magic, version, seed_tok, input_tok, layers_tok;
  if (!(hs >> magic >> version >> seed_tok >> input_tok >> layers_tok) || magic != kMagic) {
    throw ParseError("not a persona-lab network file");
  }
  if (parse_int(version) != kFormatVersion) {
    throw ParseError("unsupported network format version " + version);
  }
  auto seed = static_cast<std::uint64_t>(parse_int(strip_key(seed_tok, "seed=")));
  auto input_dim = static_cast<std::size_t>(parse_int(strip_key(input_tok, "input=")));

  std::vector<Layer> layers;
  std::string_view spec = strip_key(layers_tok, "layers=");
  std::size_t prev = input_dim;
  while (!spec.empty()) {
    auto comma = spec.find(',');
    std::string_view item = spec.substr(0, comma);
    auto colon = item.find(':');
    if (colon == std::string_view::npos) throw ParseError("bad layer spec in network header");
    long long width = parse_int(item.substr(0, colon));
    if (width <= 0) throw ParseError("layer width must be positive");
    Layer layer;
    layer.in_dim = prev;
    layer.out_dim = static_cast<std::size_t>(width);
    layer.activation = parse_activation(item.substr(colon + 1));
    layers.push_back(std::move(layer));
    prev = static_cast<std::size_t>(width);
    spec = comma == std::string_view::npos ? std::string_view{} : spec.substr(comma + 1);
  }

  std::string token;
  auto next_real = [&]() {
    if (!(in >> token)) throw ParseError("network file truncated");
    return parse_double(token);
  };
  for (Layer& layer : layers) {
    layer.weights.resize(layer.in_dim * layer.out_dim);
    layer.bias.resize(layer.out_dim);
    for (double& w : layer.weights) w = next_real();
    for (double& b : layer.bias) b = next_real();
  }
  if (in >> token) throw ParseError("trailing data after network parameters");
  return ToyNetwork(input_dim, std::move(layers), seed);
}

ToyNetwork load_network(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open network file " + path);
  return read_network(in);
}

void save_network(const std::string& path, const ToyNetwork& network) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write network file " + path);
  write_network(out, network);
  if (!out) throw IoError("write failed for " + path);
}

}  // namespace persona_lab::steer
