#include "persona_lab/ingest/bundle.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "persona_lab/error.hpp"
#include "persona_lab/format.hpp"
#include "persona_lab/ingest/csv.hpp"

namespace persona_lab::ingest {

using metrics::ModelSpec;
using metrics::ResultRecord;
using nlohmann::json;

namespace {

struct Locator {
  std::string file;
  std::size_t line;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string json_string_field(const json& obj, const char* key) {
  if (!obj.contains(key)) throw ParseError(std::string("missing key '") + key + "'");
  const json& v = obj.at(key);
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_integer()) return std::to_string(v.get<long long>());
  throw ParseError(std::string("key '") + key + "' must be a string");
}

bool parse_correct(const json& v) {
  if (v.is_boolean()) return v.get<bool>();
  if (v.is_number_integer()) {
    auto n = v.get<long long>();
    if (n == 0 || n == 1) return n == 1;
  }
  throw ParseError("'correct' must be true/false or 0/1");
}

bool parse_correct_text(std::string_view s) {
  s = trim(s);
  if (s == "1" || s == "true" || s == "True") return true;
  if (s == "0" || s == "false" || s == "False") return false;
  throw ParseError("'correct' must be true/false or 0/1, got '" + std::string(s) + "'");
}

PersonaCondition parse_persona_or_throw(std::string_view code) {
  auto p = PersonaCondition::parse(code);
  if (!p) throw ParseError("unknown persona code '" + std::string(code) + "'");
  return *p;
}

std::string rule_for(const ParseError& e) {
  return std::string(e.what()).rfind("unknown persona", 0) == 0 ? "unknown-persona" : "parse";
}

std::string utc_now_iso8601() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace

std::string Diagnostic::to_string() const {
  std::string out = file;
  if (line) out += ":" + std::to_string(line);
  if (!out.empty()) out += ": ";
  return out + "[" + rule + "] " + message;
}

std::string fnv1a64_hex(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

StudyConfig parse_study_config(const json& doc) {
  if (!doc.is_object()) throw ParseError("study config must be a JSON object");
  static const std::set<std::string> known{"domains", "hypotheses", "comparisons", "dpr",
                                           "output_dir"};
  for (const auto& [key, value] : doc.items()) {
    if (!known.count(key)) throw ParseError("unknown study config key '" + key + "'");
  }

  StudyConfig cfg;
  if (doc.contains("domains")) {
    for (const auto& [dataset, tag] : doc.at("domains").items()) {
      auto g = tag.is_string() ? metrics::parse_domain(tag.get<std::string>()) : std::nullopt;
      if (!g) throw ParseError("unknown domain group for dataset '" + dataset + "'");
      cfg.domains.set(dataset, *g);
    }
  }
  if (doc.contains("hypotheses")) {
    for (const auto& [code, tag] : doc.at("hypotheses").items()) {
      auto trait = parse_trait(code);
      auto dir = tag.is_string() ? metrics::parse_direction(tag.get<std::string>()) : std::nullopt;
      if (!trait || !dir) throw ParseError("bad hypothesis entry '" + code + "'");
      auto it = std::find_if(cfg.hypotheses.begin(), cfg.hypotheses.end(),
                             [&](const metrics::HumanHypothesis& h) { return h.trait == *trait; });
      it->predicted = *dir;
    }
  }
  if (doc.contains("comparisons")) {
    for (const json& c : doc.at("comparisons")) {
      auto trait = parse_trait(json_string_field(c, "trait"));
      if (!trait) throw ParseError("bad trait in comparison list");
      cfg.comparisons.push_back({*trait, json_string_field(c, "dataset")});
    }
  }
  if (doc.contains("dpr")) {
    const json& dpr = doc.at("dpr");
    if (dpr.contains("seed")) cfg.dpr_seed = dpr.at("seed").get<std::uint64_t>();
    if (dpr.contains("ratio")) cfg.dpr_ratio = dpr.at("ratio").get<double>();
  }
  if (doc.contains("output_dir")) cfg.output_dir = doc.at("output_dir").get<std::string>();
  return cfg;
}

nlohmann::ordered_json study_config_to_json(const StudyConfig& config) {
  nlohmann::ordered_json out;
  nlohmann::ordered_json domains = nlohmann::ordered_json::object();
  for (const auto& [dataset, g] : config.domains.entries()) domains[dataset] = metrics::domain_tag(g);
  out["domains"] = domains;
  nlohmann::ordered_json hyps = nlohmann::ordered_json::object();
  for (const auto& h : config.hypotheses) {
    hyps[std::string(1, trait_code(h.trait))] = metrics::direction_tag(h.predicted);
  }
  out["hypotheses"] = hyps;
  out["comparisons"] = nlohmann::ordered_json::array();
  for (const auto& c : config.comparisons) {
    out["comparisons"].push_back({{"trait", std::string(1, trait_code(c.trait))}, {"dataset", c.dataset}});
  }
  out["dpr"] = {{"seed", config.dpr_seed}, {"ratio", config.dpr_ratio}};
  out["output_dir"] = config.output_dir;
  return out;
}

StudyConfig load_study_config(const std::string& path) {
  try {
    return parse_study_config(json::parse(read_file(path)));
  } catch (const json::exception& e) {
    throw ParseError(path + ": " + e.what());
  }
}

void save_study_config(const std::string& path, const StudyConfig& config) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  out << study_config_to_json(config).dump(2) << '\n';
}

const ModelSpec* StudyBundle::find_model(const std::string& name) const {
  auto it = std::lower_bound(models.begin(), models.end(), name,
                             [](const ModelSpec& m, const std::string& n) { return m.name < n; });
  return it != models.end() && it->name == name ? &*it : nullptr;
}

std::vector<std::string> StudyBundle::arch_subset() const {
  std::vector<std::string> out;
  for (const ModelSpec& m : models) {
    if (m.arch_subset) out.push_back(m.name);
  }
  return out;
}

namespace {

using LineRecords = std::vector<std::pair<ResultRecord, std::size_t>>;

LineRecords read_jsonl_lines(std::istream& in, const std::string& file, ValidationReport& report) {
  LineRecords out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    try {
      json obj = json::parse(line);
      if (!obj.is_object()) throw ParseError("record must be a JSON object");
      ResultRecord r;
      r.model = json_string_field(obj, "model");
      r.persona = parse_persona_or_throw(json_string_field(obj, "persona"));
      r.dataset = json_string_field(obj, "dataset");
      r.item_id = json_string_field(obj, "item_id");
      if (!obj.contains("correct")) throw ParseError("missing key 'correct'");
      r.correct = parse_correct(obj.at("correct"));
      out.emplace_back(std::move(r), line_no);
    } catch (const ParseError& e) {
      report.errors.push_back({file, line_no, rule_for(e), e.what()});
    } catch (const json::exception& e) {
      report.errors.push_back({file, line_no, "parse", e.what()});
    }
  }
  return out;
}

LineRecords read_csv_lines(std::istream& in, const std::string& file, ValidationReport& report) {
  LineRecords out;
  std::string line;
  if (!std::getline(in, line)) {
    report.errors.push_back({file, 1, "parse", "empty CSV file"});
    return out;
  }
  const auto header = split_csv_line(line);
  const std::vector<std::string> expected{"model", "persona", "dataset", "item_id", "correct"};
  if (header != expected) {
    report.errors.push_back({file, 1, "parse", "CSV header must be model,persona,dataset,item_id,correct"});
    return out;
  }
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    try {
      auto f = split_csv_line(line);
      if (f.size() != 5) throw ParseError("expected 5 fields, got " + std::to_string(f.size()));
      out.emplace_back(
          ResultRecord{f[0], parse_persona_or_throw(f[1]), f[2], f[3], parse_correct_text(f[4])},
          line_no);
    } catch (const ParseError& e) {
      report.errors.push_back({file, line_no, rule_for(e), e.what()});
    }
  }
  return out;
}

std::vector<ResultRecord> strip_lines(LineRecords located) {
  std::vector<ResultRecord> out;
  out.reserve(located.size());
  for (auto& [r, line] : located) out.push_back(std::move(r));
  return out;
}

}  // namespace

std::vector<ResultRecord> read_records_jsonl(std::istream& in, const std::string& file,
                                             ValidationReport& report) {
  return strip_lines(read_jsonl_lines(in, file, report));
}

std::vector<ResultRecord> read_records_csv(std::istream& in, const std::string& file,
                                           ValidationReport& report) {
  return strip_lines(read_csv_lines(in, file, report));
}

std::vector<ModelSpec> read_models_jsonl(std::istream& in, const std::string& file,
                                         ValidationReport& report) {
  std::vector<ModelSpec> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    try {
      json obj = json::parse(line);
      ModelSpec m;
      m.name = json_string_field(obj, "model");
      if (!obj.contains("params_b") || !obj.at("params_b").is_number()) {
        throw ParseError("'params_b' must be a number");
      }
      m.params_b = obj.at("params_b").get<double>();
      m.family = obj.contains("family") ? json_string_field(obj, "family") : "";
      m.arch_subset = obj.contains("arch_subset") ? obj.at("arch_subset").get<bool>() : false;
      if (!(m.params_b > 0.0)) {
        report.errors.push_back({file, line_no, "invalid-model", "params_b must be positive"});
        continue;
      }
      out.push_back(std::move(m));
    } catch (const ParseError& e) {
      report.errors.push_back({file, line_no, "parse", e.what()});
    } catch (const json::exception& e) {
      report.errors.push_back({file, line_no, "parse", e.what()});
    }
  }
  return out;
}

BundleLoad load_bundle(const BundlePaths& paths, Strictness strictness) {
  BundleLoad result;
  ValidationReport& report = result.report;
  StudyBundle bundle;

  auto digest = [&](const std::string& path) -> std::optional<std::string> {
    try {
      std::string bytes = read_file(path);
      bundle.provenance.sources.push_back({path, fnv1a64_hex(bytes)});
      return bytes;
    } catch (const IoError& e) {
      report.errors.push_back({path, 0, "io", e.what()});
      return std::nullopt;
    }
  };

  if (paths.config) {
    if (auto bytes = digest(*paths.config)) {
      try {
        bundle.config = parse_study_config(json::parse(*bytes));
      } catch (const ParseError& e) {
        report.errors.push_back({*paths.config, 0, "config", e.what()});
      } catch (const json::exception& e) {
        report.errors.push_back({*paths.config, 0, "config", e.what()});
      }
    }
  }

  if (auto bytes = digest(paths.models)) {
    std::istringstream in(*bytes);
    bundle.models = read_models_jsonl(in, paths.models, report);
  }
  std::sort(bundle.models.begin(), bundle.models.end(),
            [](const ModelSpec& a, const ModelSpec& b) { return a.name < b.name; });
  for (std::size_t i = 1; i < bundle.models.size(); ++i) {
    if (bundle.models[i].name == bundle.models[i - 1].name) {
      report.errors.push_back({paths.models, 0, "duplicate-model",
                               "model '" + bundle.models[i].name + "' is listed twice"});
    }
  }

  std::vector<std::pair<ResultRecord, Locator>> located;
  for (const std::string& path : paths.records) {
    auto bytes = digest(path);
    if (!bytes) continue;
    std::istringstream in(*bytes);
    const bool csv = std::filesystem::path(path).extension() == ".csv";
    for (auto& [r, line] : csv ? read_csv_lines(in, path, report) : read_jsonl_lines(in, path, report)) {
      located.push_back({std::move(r), Locator{path, line}});
    }
  }

  std::sort(located.begin(), located.end(), [](const auto& a, const auto& b) {
    if (canonical_less(a.first, b.first)) return true;
    if (canonical_less(b.first, a.first)) return false;
    return std::tie(a.second.file, a.second.line) < std::tie(b.second.file, b.second.line);
  });

  for (std::size_t i = 0; i < located.size(); ++i) {
    const auto& [r, loc] = located[i];
    if (!bundle.find_model(r.model)) {
      report.errors.push_back({loc.file, loc.line, "unknown-model",
                               "record references unknown model '" + r.model + "'"});
    }
    if (!bundle.config.domains.group_of(r.dataset)) {
      report.errors.push_back({loc.file, loc.line, "unknown-dataset",
                               "dataset '" + r.dataset + "' has no domain mapping"});
    }
    if (i > 0) {
      const auto& prev = located[i - 1].first;
      if (prev.model == r.model && prev.dataset == r.dataset && prev.persona == r.persona &&
          prev.item_id == r.item_id) {
        report.errors.push_back({loc.file, loc.line, "duplicate-record",
                                 "duplicate (" + r.model + ", " + r.persona.code() + ", " +
                                     r.dataset + ", " + r.item_id + ")"});
      }
    }
  }

  bundle.records.reserve(located.size());
  for (auto& [r, loc] : located) bundle.records.push_back(std::move(r));

  auto violations = metrics::find_paired_design_violations(bundle.records);
  if (!violations.empty()) {
    std::set<std::pair<std::string, std::string>> dropped;
    for (const auto& v : violations) {
      Diagnostic d{"", 0, "paired-design",
                   "(" + v.model + ", " + v.dataset + "): " + v.detail};
      if (strictness == Strictness::Strict) {
        report.errors.push_back(std::move(d));
      } else {
        d.message += "; block dropped";
        report.warnings.push_back(std::move(d));
        dropped.insert({v.model, v.dataset});
      }
    }
    if (strictness == Strictness::Lenient) {
      std::erase_if(bundle.records, [&](const ResultRecord& r) {
        return dropped.count({r.model, r.dataset}) != 0;
      });
    }
  }

  std::sort(bundle.provenance.sources.begin(), bundle.provenance.sources.end(),
            [](const SourceDigest& a, const SourceDigest& b) {
              return std::tie(a.fnv1a64, a.path) < std::tie(b.fnv1a64, b.path);
            });
  bundle.provenance.loaded_at = utc_now_iso8601();

  if (report.ok()) result.bundle = std::move(bundle);
  return result;
}

void write_records_jsonl(std::ostream& out, const std::vector<ResultRecord>& records) {
  for (const ResultRecord& r : records) {
    nlohmann::ordered_json obj;
    obj["model"] = r.model;
    obj["persona"] = r.persona.code();
    obj["dataset"] = r.dataset;
    obj["item_id"] = r.item_id;
    obj["correct"] = r.correct;
    out << obj.dump() << '\n';
  }
}

void write_records_csv(std::ostream& out, const std::vector<ResultRecord>& records) {
  write_csv_row(out, {"model", "persona", "dataset", "item_id", "correct"});
  for (const ResultRecord& r : records) {
    write_csv_row(out, {r.model, r.persona.code(), r.dataset, r.item_id, r.correct ? "1" : "0"});
  }
}

void write_models_jsonl(std::ostream& out, const std::vector<ModelSpec>& models) {
  for (const ModelSpec& m : models) {
    nlohmann::ordered_json obj;
    obj["model"] = m.name;
    obj["params_b"] = m.params_b;
    obj["family"] = m.family;
    obj["arch_subset"] = m.arch_subset;
    out << obj.dump() << '\n';
  }
}

BundlePaths save_bundle(const StudyBundle& bundle, const std::string& dir) {
  std::filesystem::create_directories(dir);
  BundlePaths paths;
  paths.records = {(std::filesystem::path(dir) / "records.jsonl").string()};
  paths.models = (std::filesystem::path(dir) / "models.jsonl").string();
  paths.config = (std::filesystem::path(dir) / "config.json").string();
  {
    std::ofstream out(paths.records[0], std::ios::binary);
    if (!out) throw IoError("cannot write " + paths.records[0]);
    write_records_jsonl(out, bundle.records);
  }
  {
    std::ofstream out(paths.models, std::ios::binary);
    if (!out) throw IoError("cannot write " + paths.models);
    write_models_jsonl(out, bundle.models);
  }
  save_study_config(*paths.config, bundle.config);
  return paths;
}

}  // namespace persona_lab::ingest
