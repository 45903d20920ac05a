#include "cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <ostream>
#include <random>

#include "persona_lab/dpr/routing.hpp"
#include "persona_lab/error.hpp"
#include "persona_lab/format.hpp"
#include "persona_lab/ingest/bundle.hpp"
#include "persona_lab/ingest/corpus_io.hpp"
#include "persona_lab/ingest/report.hpp"
#include "persona_lab/ingest/study_reports.hpp"
#include "persona_lab/random.hpp"
#include "persona_lab/steer/network.hpp"
#include "persona_lab/steer/trait_neurons.hpp"

namespace persona_lab::cli {

namespace fs = std::filesystem;

namespace {

// Usage errors detected after CLI11 parsing (e.g. a missing memory file).
class UsageError : public Error {
 public:
  using Error::Error;
};

struct GlobalOptions {
  std::string config;
  std::string out;
  std::uint64_t seed = 42;
  bool seed_given = false;
  bool lenient = false;
  std::string format = "csv";
  bool render = false;
  int verbosity = 0;
};

struct IdentifyOptions {
  std::string network;
  std::string high;
  std::string low;
  double tau = 0.0;
  std::string trait;
};

struct SteerDemoOptions {
  std::string network;
  std::string map;
  std::string inputs;
  std::string trait = "O";
  std::string polarity = "high";
  double alpha = 0.5;
  double tau = 0.3;
  std::size_t samples = 200;
  std::size_t input_dim = 16;
};

struct AnalyzeOptions {
  std::string which;
  std::vector<std::string> records;
  std::string models;
};

struct RouteOptions {
  std::string action;
  std::string corpus;
  std::string memory;
  double ratio = 0.9;
  bool ratio_given = false;
  unsigned threads = 1;
};

ingest::ReportFormat report_format(const GlobalOptions& g) {
  return g.format == "json" ? ingest::ReportFormat::Json : ingest::ReportFormat::Csv;
}

std::optional<ingest::StudyConfig> load_config(const GlobalOptions& g) {
  if (g.config.empty()) return std::nullopt;
  return ingest::load_study_config(g.config);
}

fs::path output_dir(const GlobalOptions& g, const std::optional<ingest::StudyConfig>& cfg) {
  fs::path dir = !g.out.empty() ? fs::path(g.out)
                 : (cfg && !cfg->output_dir.empty()) ? fs::path(cfg->output_dir)
                                                     : fs::path(".");
  fs::create_directories(dir);
  return dir;
}

Trait require_trait(const std::string& code) {
  auto t = parse_trait(code);
  if (!t) throw UsageError("unknown trait '" + code + "' (expected one of A C E N O)");
  return *t;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
}

int cmd_identify(const GlobalOptions& g, const IdentifyOptions& o, std::ostream& out) {
  const Trait trait = require_trait(o.trait);
  const auto network = steer::load_network(o.network);
  const auto high = steer::load_samples(o.high);
  const auto low = steer::load_samples(o.low);
  const auto map = steer::identify_trait_neurons(network, trait, high, low, o.tau);

  const fs::path path = output_dir(g, load_config(g)) /
                        ("trait_neurons_" + std::string(1, trait_code(trait)) + ".csv");
  steer::save_neuron_map(path.string(), map);
  out << "identified " << map.positive_set().size() << " positive and "
      << map.negative_set().size() << " negative neurons for " << trait_name(trait) << " -> "
      << path.string() << '\n';
  return kExitOk;
}

// Trait corpora for the demo: uniform noise shifted by +shift (high) or
// -shift (low) on the first half of the input dimensions.
std::vector<steer::Sample> demo_corpus(std::size_t n, std::size_t dim, double shift,
                                       std::mt19937_64& rng) {
  std::vector<steer::Sample> samples(n, steer::Sample(dim));
  for (auto& s : samples) {
    for (std::size_t i = 0; i < dim; ++i) {
      s[i] = uniform_real(rng, -1.0, 1.0) + (i < dim / 2 ? shift : 0.0);
    }
  }
  return samples;
}

double mean_over(const std::vector<double>& values, const std::vector<steer::NeuronId>& ids,
                 std::size_t layer) {
  double sum = 0.0;
  std::size_t n = 0;
  for (const auto& id : ids) {
    if (id.layer != layer) continue;
    sum += values[id.unit];
    ++n;
  }
  return n ? sum / static_cast<double>(n) : 0.0;
}

int cmd_steer_demo(const GlobalOptions& g, const SteerDemoOptions& o, std::ostream& out) {
  const Trait trait = require_trait(o.trait);
  if (o.polarity != "high" && o.polarity != "low") {
    throw UsageError("--polarity must be high or low");
  }
  const Polarity polarity = o.polarity == "high" ? Polarity::High : Polarity::Low;
  const fs::path dir = output_dir(g, load_config(g));
  std::mt19937_64 rng(g.seed);

  auto network = o.network.empty() ? steer::ToyNetwork::default_random(o.input_dim, g.seed)
                                   : steer::load_network(o.network);
  std::shared_ptr<const steer::TraitNeuronMap> map;
  if (!o.map.empty()) {
    map = std::make_shared<steer::TraitNeuronMap>(steer::load_neuron_map(o.map));
    if (map->trait() != trait) throw UsageError("--trait does not match the neuron map");
  } else {
    const auto high = demo_corpus(o.samples, network.input_dim(), 0.75, rng);
    const auto low = demo_corpus(o.samples, network.input_dim(), -0.75, rng);
    map = std::make_shared<steer::TraitNeuronMap>(
        steer::identify_trait_neurons(network, trait, high, low, o.tau));
  }
  const auto inputs = o.inputs.empty() ? demo_corpus(o.samples, network.input_dim(), 0.0, rng)
                                       : steer::load_samples(o.inputs);

  steer::save_network((dir / "network.txt").string(), network);
  steer::save_neuron_map((dir / ("trait_neurons_" + std::string(1, trait_code(trait)) + ".csv")).string(), *map);

  const steer::SteeringConfig config(map, polarity, o.alpha);
  auto boosted = polarity == Polarity::High ? map->positive_set() : map->negative_set();
  auto suppressed = polarity == Polarity::High ? map->negative_set() : map->positive_set();

  ingest::ReportTable table;
  table.name = "steering_demo";
  table.columns = {"sample", "layer", "boosted_baseline", "boosted_steered", "suppressed_baseline",
                   "suppressed_steered", "output_shift"};
  double total_shift = 0.0;
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    const auto base = steer::forward(network, inputs[i]);
    const auto steered = steer::forward(network, inputs[i], &config);
    double shift_sq = 0.0;
    for (std::size_t k = 0; k < base.output.size(); ++k) {
      const double d = steered.output[k] - base.output[k];
      shift_sq += d * d;
    }
    total_shift += std::sqrt(shift_sq);
    for (std::size_t l = 0; l < network.num_layers(); ++l) {
      table.rows.push_back({ingest::Cell::integer(static_cast<long long>(i)),
                            ingest::Cell::integer(static_cast<long long>(l)),
                            ingest::Cell::real(mean_over(base.activations[l], boosted, l)),
                            ingest::Cell::real(mean_over(steered.activations[l], boosted, l)),
                            ingest::Cell::real(mean_over(base.activations[l], suppressed, l)),
                            ingest::Cell::real(mean_over(steered.activations[l], suppressed, l)),
                            ingest::Cell::real(std::sqrt(shift_sq))});
    }
  }
  const auto fmt = report_format(g);
  const fs::path report = dir / (table.name + ingest::extension_for(fmt));
  ingest::persist_report(table, report.string(), fmt);
  out << trait_name(trait) << ' ' << o.polarity << " alpha=" << format_shortest(o.alpha) << ": "
      << boosted.size() << " boosted, " << suppressed.size() << " suppressed neurons; mean output shift "
      << format_fixed(inputs.empty() ? 0.0 : total_shift / static_cast<double>(inputs.size()), 4)
      << " over " << inputs.size() << " inputs -> " << report.string() << '\n';
  return kExitOk;
}

int cmd_analyze(const GlobalOptions& g, const AnalyzeOptions& o, std::ostream& out,
                std::ostream& err) {
  ingest::BundlePaths paths;
  paths.records = o.records;
  paths.models = o.models;
  if (!g.config.empty()) paths.config = g.config;
  auto load = ingest::load_bundle(paths, g.lenient ? ingest::Strictness::Lenient
                                                   : ingest::Strictness::Strict);
  for (const auto& w : load.report.warnings) err << "warning: " << w.to_string() << '\n';
  if (!load.bundle) {
    for (const auto& e : load.report.errors) err << "error: " << e.to_string() << '\n';
    return kExitValidation;
  }
  const ingest::StudyBundle& bundle = *load.bundle;
  const fs::path dir = output_dir(g, bundle.config);
  const auto fmt = report_format(g);

  std::vector<ingest::ReportTable> tables;
  auto add = [&](std::vector<ingest::ReportTable> more) {
    for (auto& t : more) tables.push_back(std::move(t));
  };
  const bool all = o.which == "all";
  if (all || o.which == "rq1") add(ingest::rq1_reports(bundle));
  if (all || o.which == "rq2") add(ingest::rq2_reports(bundle));
  if (all || o.which == "rq3") add(ingest::rq3_reports(bundle));
  if (all || o.which == "rq4") add(ingest::rq4_reports(bundle));

  for (const auto& t : tables) {
    const fs::path path = dir / (t.name + ingest::extension_for(fmt));
    ingest::persist_report(t, path.string(), fmt);
    if (g.verbosity > 0) out << "wrote " << path.string() << '\n';
    if (g.render && t.name.rfind("rq1_", 0) == 0) {
      write_text(dir / (t.name + ".svg"), ingest::render_heatmap_svg(t, t.name));
    }
  }
  out << "analyze " << o.which << ": " << bundle.records.size() << " records, " << tables.size()
      << " reports -> " << dir.string() << '\n';
  return kExitOk;
}

std::map<std::string, std::vector<dpr::CorpusItem>> by_dataset(std::vector<dpr::CorpusItem> items) {
  std::map<std::string, std::vector<dpr::CorpusItem>> groups;
  for (auto& item : items) groups[item.dataset].push_back(std::move(item));
  return groups;
}

int cmd_route(const GlobalOptions& g, const RouteOptions& o, std::ostream& out) {
  const auto cfg = load_config(g);
  const std::uint64_t seed = g.seed_given ? g.seed : cfg ? cfg->dpr_seed : g.seed;
  const double ratio = o.ratio_given ? o.ratio : cfg ? cfg->dpr_ratio : o.ratio;

  if (o.action == "build") {
    const fs::path dir = output_dir(g, cfg);
    const fs::path memory_path = o.memory.empty() ? dir / "routing_memory.json" : fs::path(o.memory);
    std::vector<dpr::RoutingMemory> memories;
    for (auto& [dataset, items] : by_dataset(ingest::load_corpus(o.corpus))) {
      auto split = dpr::split_reference_test(std::move(items), ratio, seed);
      std::vector<std::string> test_ids;
      for (const auto& t : split.test) test_ids.push_back(t.item_id);
      memories.push_back(dpr::RoutingMemory::build(std::move(split.reference), seed, ratio, std::move(test_ids)));
      out << dataset << ": " << memories.back().reference().size() << " reference, "
          << memories.back().test_ids().size() << " test items\n";
    }
    if (memories.empty()) throw InvalidArgument("corpus " + o.corpus + " has no items");
    ingest::save_memories(memory_path.string(), memories);
    out << "routing memory -> " << memory_path.string() << '\n';
    return kExitOk;
  }

  if (o.memory.empty() || !fs::exists(o.memory)) {
    throw UsageError("route eval needs an existing --memory file");
  }
  const auto memories = ingest::load_memories(o.memory);
  auto groups = by_dataset(ingest::load_corpus(o.corpus));
  const fs::path dir = output_dir(g, cfg);
  const auto fmt = report_format(g);

  std::vector<dpr::RoutingReport> reports;
  for (const auto& memory : memories) {
    auto it = groups.find(memory.dataset());
    if (it == groups.end()) throw InvalidArgument("corpus has no items for dataset " + memory.dataset());
    auto split = dpr::split_reference_test(it->second, memory.ratio(), memory.seed());
    std::vector<std::string> test_ids;
    for (const auto& t : split.test) test_ids.push_back(t.item_id);
    if (split.reference != memory.reference() || test_ids != memory.test_ids()) {
      throw InvalidArgument("corpus for " + memory.dataset() + " no longer matches the routing memory");
    }
    reports.push_back(dpr::evaluate_routing(memory, split.test, o.threads));
    const auto& r = reports.back();
    const auto table = ingest::routing_report_table(r);
    ingest::persist_report(table, (dir / (table.name + ingest::extension_for(fmt))).string(), fmt);
    out << r.dataset << ": " << r.correct << '/' << r.sampled << " hits, accuracy "
        << format_fixed(r.accuracy, 2) << "%, best static " << r.best_persona.code() << ' '
        << format_fixed(r.best_baseline, 2) << "%\n";
  }
  ingest::persist_json(ingest::routing_summary_json(reports), (dir / "routing_summary.json").string());
  ingest::persist_json(ingest::routing_details_json(reports), (dir / "routing_details.json").string());
  return kExitOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"persona-lab: trait-neuron steering, persona-effect analysis and persona routing"};
  app.name("persona-lab");
  app.fallthrough();
  app.require_subcommand(1);

  GlobalOptions g;
  app.add_option("--config", g.config, "Study config (JSON)")->check(CLI::ExistingFile);
  app.add_option("--out", g.out, "Output directory (default: config output_dir, else .)");
  auto* seed_opt = app.add_option("--seed", g.seed, "Seed for splits and synthetic data")
                       ->capture_default_str();
  auto* strict = app.add_flag("--strict", "Reject paired-design violations (default)");
  auto* lenient = app.add_flag("--lenient", g.lenient, "Drop incomplete (model, dataset) blocks");
  strict->excludes(lenient);
  app.add_option("--format", g.format, "Report format")
      ->check(CLI::IsMember({"csv", "json"}))
      ->capture_default_str();
  app.add_flag("--render", g.render, "Also write SVG heatmaps of the RQ1 matrices");
  app.add_flag("-v,--verbose", g.verbosity, "Log each file written");

  IdentifyOptions id;
  auto* identify = app.add_subcommand("identify", "Find trait-specific neurons from contrasting corpora");
  identify->add_option("--network", id.network, "Network file")->required()->check(CLI::ExistingFile);
  identify->add_option("--high", id.high, "High-trait sample corpus")->required()->check(CLI::ExistingFile);
  identify->add_option("--low", id.low, "Low-trait sample corpus")->required()->check(CLI::ExistingFile);
  identify->add_option("--tau", id.tau, "Selection threshold in (0, 1)")
      ->required()
      ->check(CLI::Range(0.0, 1.0));
  identify->add_option("--trait", id.trait, "Trait code: A C E N O")->required();

  SteerDemoOptions sd;
  auto* demo = app.add_subcommand("steer-demo", "Identify and steer neurons on a seeded toy network");
  demo->add_option("--network", sd.network, "Network file (default: seeded 2x64 network)")
      ->check(CLI::ExistingFile);
  demo->add_option("--map", sd.map, "Trait neuron map CSV (default: identify on synthetic corpora)")
      ->check(CLI::ExistingFile);
  demo->add_option("--inputs", sd.inputs, "Inputs to steer (default: synthetic neutral samples)")
      ->check(CLI::ExistingFile);
  demo->add_option("--trait", sd.trait, "Trait code")->capture_default_str();
  demo->add_option("--polarity", sd.polarity, "high or low")
      ->check(CLI::IsMember({"high", "low"}))
      ->capture_default_str();
  demo->add_option("--alpha", sd.alpha, "Steering strength")->check(CLI::NonNegativeNumber)->capture_default_str();
  demo->add_option("--tau", sd.tau, "Selection threshold")->check(CLI::Range(0.0, 1.0))->capture_default_str();
  demo->add_option("--samples", sd.samples, "Synthetic samples per corpus")->check(CLI::PositiveNumber)->capture_default_str();
  demo->add_option("--input-dim", sd.input_dim, "Input width of the default network")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();

  AnalyzeOptions an;
  auto* analyze = app.add_subcommand("analyze", "Persona-effect analyses (rq1 | rq2 | rq3 | rq4 | all)");
  analyze->add_option("which", an.which, "Analysis to run")
      ->required()
      ->check(CLI::IsMember({"rq1", "rq2", "rq3", "rq4", "all"}));
  analyze->add_option("--records", an.records, "Result records (JSON lines or .csv)")
      ->required()
      ->check(CLI::ExistingFile);
  analyze->add_option("--models", an.models, "Model metadata (JSON lines)")
      ->required()
      ->check(CLI::ExistingFile);

  RouteOptions ro;
  auto* route = app.add_subcommand("route", "Dynamic persona routing (build | eval)");
  route->add_option("action", ro.action, "build or eval")
      ->required()
      ->check(CLI::IsMember({"build", "eval"}));
  route->add_option("--corpus", ro.corpus, "Corpus (JSON lines)")->required()->check(CLI::ExistingFile);
  route->add_option("--memory", ro.memory, "Routing memory file (build: output, eval: input)");
  auto* ratio_opt = route->add_option("--ratio", ro.ratio, "Reference fraction of each dataset")
                        ->check(CLI::Range(0.0, 1.0))
                        ->capture_default_str();
  route->add_option("--threads", ro.threads, "Worker threads for evaluation")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kExitOk : kExitUsage;
  }
  g.seed_given = seed_opt->count() > 0;
  ro.ratio_given = ratio_opt->count() > 0;

  try {
    if (*identify) return cmd_identify(g, id, out);
    if (*demo) return cmd_steer_demo(g, sd, out);
    if (*analyze) return cmd_analyze(g, an, out, err);
    if (*route) return cmd_route(g, ro, out);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n" << app.help();
    return kExitUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  }
  return kExitUsage;
}

}  // namespace persona_lab::cli
