#include "persona_lab/steer/trait_neurons.hpp"

#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "persona_lab/error.hpp"
#include "persona_lab/format.hpp"
#include "persona_lab/ingest/csv.hpp"

namespace persona_lab::steer {

void TraitNeuronMap::insert(NeuronId id, NeuronScore score) {
  if (!(score.h_ref >= 0.0)) throw InvalidArgument("h_ref must be non-negative");
  if (score.delta < -1.0 || score.delta > 1.0) throw InvalidArgument("delta outside [-1, 1]");
  if (score.membership == Membership::Positive && !(score.delta > tau_)) {
    throw InvalidArgument("positive-set neuron must have delta > tau");
  }
  if (score.membership == Membership::Negative && !(score.delta < -tau_)) {
    throw InvalidArgument("negative-set neuron must have delta < -tau");
  }
  neurons_.insert_or_assign(id, score);
}

const NeuronScore* TraitNeuronMap::find(const NeuronId& id) const {
  auto it = neurons_.find(id);
  return it == neurons_.end() ? nullptr : &it->second;
}

std::vector<NeuronId> TraitNeuronMap::positive_set() const {
  std::vector<NeuronId> out;
  for (const auto& [id, s] : neurons_) {
    if (s.membership == Membership::Positive) out.push_back(id);
  }
  return out;
}

std::vector<NeuronId> TraitNeuronMap::negative_set() const {
  std::vector<NeuronId> out;
  for (const auto& [id, s] : neurons_) {
    if (s.membership == Membership::Negative) out.push_back(id);
  }
  return out;
}

SteeringConfig::SteeringConfig(std::shared_ptr<const TraitNeuronMap> map, Polarity polarity,
                               double alpha)
    : map_(std::move(map)), polarity_(polarity), alpha_(alpha) {
  if (!map_) throw ConfigError("steering config needs a neuron map");
  if (!std::isfinite(alpha_) || alpha_ < 0.0) throw ConfigError("steering strength must be >= 0");
}

void SteeringConfig::validate_for(const ToyNetwork& network) const {
  for (const auto& [id, score] : map_->neurons()) {
    if (!network.contains(id)) {
      throw ConfigError("neuron (" + std::to_string(id.layer) + "," + std::to_string(id.unit) +
                        ") is outside the network");
    }
  }
}

double apply_steering(double h, const NeuronId& neuron, const SteeringConfig& config) {
  // alpha = 0 is the baseline condition: no neuron is touched, not even the
  // suppressed set.
  if (config.alpha() == 0.0) return h;
  const NeuronScore* score = config.map().find(neuron);
  if (score == nullptr) return h;
  bool boosted = score->membership == Membership::Positive;
  if (config.polarity() == Polarity::Low) boosted = !boosted;
  return boosted ? h + config.alpha() * score->h_ref : 0.0;
}

FiringTally tally_firing(const ToyNetwork& network, std::span<const Sample> samples) {
  FiringTally tally;
  tally.samples = samples.size();
  for (const Layer& layer : network.layers()) {
    tally.fire_counts.emplace_back(layer.out_dim, 0);
    tally.positive_sums.emplace_back(layer.out_dim, 0.0);
  }
  for (const Sample& sample : samples) {
    ForwardResult fr = forward(network, sample);
    for (std::size_t l = 0; l < fr.activations.size(); ++l) {
      for (std::size_t u = 0; u < fr.activations[l].size(); ++u) {
        double h = fr.activations[l][u];
        if (h > 0.0) {
          ++tally.fire_counts[l][u];
          tally.positive_sums[l][u] += h;
        }
      }
    }
  }
  return tally;
}

double activation_probability(const ToyNetwork& network, std::span<const Sample> samples,
                              const NeuronId& neuron) {
  if (samples.empty()) throw EmptyCorpus("activation probability needs at least one sample");
  if (!network.contains(neuron)) throw InvalidInput("neuron outside the network");
  std::size_t fired = 0;
  for (const Sample& sample : samples) {
    ForwardResult fr = forward(network, sample);
    if (fr.activations[neuron.layer][neuron.unit] > 0.0) ++fired;
  }
  return static_cast<double>(fired) / static_cast<double>(samples.size());
}

std::vector<std::vector<double>> activation_deltas(const ToyNetwork& network,
                                                   std::span<const Sample> high_samples,
                                                   std::span<const Sample> low_samples) {
  if (high_samples.empty() || low_samples.empty()) {
    throw EmptyCorpus("identification needs non-empty high and low corpora");
  }
  FiringTally high = tally_firing(network, high_samples);
  FiringTally low = tally_firing(network, low_samples);
  const auto nh = static_cast<double>(high.samples);
  const auto nl = static_cast<double>(low.samples);
  std::vector<std::vector<double>> deltas(network.num_layers());
  for (std::size_t l = 0; l < deltas.size(); ++l) {
    deltas[l].resize(network.layer_width(l));
    for (std::size_t u = 0; u < deltas[l].size(); ++u) {
      deltas[l][u] = static_cast<double>(high.fire_counts[l][u]) / nh -
                     static_cast<double>(low.fire_counts[l][u]) / nl;
    }
  }
  return deltas;
}

TraitNeuronMap identify_trait_neurons(const ToyNetwork& network, Trait trait,
                                      std::span<const Sample> high_samples,
                                      std::span<const Sample> low_samples, double tau) {
  if (!(tau > 0.0 && tau < 1.0)) throw InvalidArgument("tau must lie in (0, 1)");
  if (high_samples.empty() || low_samples.empty()) {
    throw EmptyCorpus("identification needs non-empty high and low corpora");
  }
  FiringTally high = tally_firing(network, high_samples);
  FiringTally low = tally_firing(network, low_samples);
  const auto nh = static_cast<double>(high.samples);
  const auto nl = static_cast<double>(low.samples);

  TraitNeuronMap map(trait, tau);
  for (std::size_t l = 0; l < network.num_layers(); ++l) {
    for (std::size_t u = 0; u < network.layer_width(l); ++u) {
      double delta = static_cast<double>(high.fire_counts[l][u]) / nh -
                     static_cast<double>(low.fire_counts[l][u]) / nl;
      Membership membership;
      if (delta > tau) {
        membership = Membership::Positive;
      } else if (delta < -tau) {
        membership = Membership::Negative;
      } else {
        continue;
      }
      std::size_t fired = high.fire_counts[l][u];
      double h_ref = fired ? high.positive_sums[l][u] / static_cast<double>(fired) : 0.0;
      map.insert(NeuronId{l, u}, NeuronScore{delta, membership, h_ref});
    }
  }
  return map;
}

void write_neuron_map(std::ostream& out, const TraitNeuronMap& map) {
  out << "# trait=" << trait_code(map.trait()) << " tau=" << format_shortest(map.tau()) << '\n';
  out << "trait,layer,unit,delta,membership,h_ref\n";
  for (const auto& [id, s] : map.neurons()) {
    out << trait_code(map.trait()) << ',' << id.layer << ',' << id.unit << ','
        << format_shortest(s.delta) << ',' << static_cast<char>(s.membership) << ','
        << format_shortest(s.h_ref) << '\n';
  }
}

TraitNeuronMap read_neuron_map(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line.rfind("# trait=", 0) != 0) {
    throw ParseError("neuron map: missing '# trait=... tau=...' line");
  }
  std::istringstream meta(line.substr(2));
  std::string trait_tok, tau_tok;
  meta >> trait_tok >> tau_tok;
  auto trait = parse_trait(std::string_view(trait_tok).substr(6));
  if (!trait || tau_tok.rfind("tau=", 0) != 0) throw ParseError("neuron map: bad metadata line");
  TraitNeuronMap map(*trait, parse_double(std::string_view(tau_tok).substr(4)));

  if (!std::getline(in, line) || trim(line) != "trait,layer,unit,delta,membership,h_ref") {
    throw ParseError("neuron map: unexpected header");
  }
  std::size_t line_no = 2;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    auto fields = ingest::split_csv_line(line);
    if (fields.size() != 6) {
      throw ParseError("neuron map line " + std::to_string(line_no) + ": expected 6 fields");
    }
    if (parse_trait(fields[0]) != trait) {
      throw ParseError("neuron map line " + std::to_string(line_no) + ": trait mismatch");
    }
    NeuronId id{static_cast<std::size_t>(parse_int(fields[1])),
                static_cast<std::size_t>(parse_int(fields[2]))};
    NeuronScore score;
    score.delta = parse_double(fields[3]);
    if (fields[4] == "+") {
      score.membership = Membership::Positive;
    } else if (fields[4] == "-") {
      score.membership = Membership::Negative;
    } else {
      throw ParseError("neuron map line " + std::to_string(line_no) + ": membership must be + or -");
    }
    score.h_ref = parse_double(fields[5]);
    map.insert(id, score);
  }
  return map;
}

void save_neuron_map(const std::string& path, const TraitNeuronMap& map) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write neuron map " + path);
  write_neuron_map(out, map);
}

TraitNeuronMap load_neuron_map(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open neuron map " + path);
  return read_neuron_map(in);
}

std::vector<Sample> read_samples(std::istream& in) {
  std::vector<Sample> samples;
  std::string line;
  while (std::getline(in, line)) {
    std::string_view body = trim(line);
    if (body.empty() || body.front() == '#') continue;
    std::istringstream ls{std::string(body)};
    Sample s;
    std::string tok;
    while (ls >> tok) s.push_back(parse_double(tok));
    samples.push_back(std::move(s));
  }
  return samples;
}

std::vector<Sample> load_samples(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open sample corpus " + path);
  return read_samples(in);
}

void save_samples(const std::string& path, std::span<const Sample> samples) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write sample corpus " + path);
  for (const Sample& s : samples) {
    for (std::size_t i = 0; i < s.size(); ++i) out << (i ? " " : "") << format_shortest(s[i]);
    out << '\n';
  }
}

}  // namespace persona_lab::steer
