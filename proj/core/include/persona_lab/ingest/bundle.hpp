#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "persona_lab/metrics/records.hpp"

namespace persona_lab::ingest {

enum class Strictness { Strict, Lenient };

struct Diagnostic {
  std::string file;
  std::size_t line = 0;  // 1-based; 0 when the finding is not tied to a line
  std::string rule;
  std::string message;

  std::string to_string() const;
};

struct ValidationReport {
  std::vector<Diagnostic> errors;    // fatal
  std::vector<Diagnostic> warnings;  // non-fatal

  bool ok() const { return errors.empty(); }
};

/// Analysis settings shared by the CLI subcommands.
struct StudyConfig {
  metrics::DomainMap domains = metrics::DomainMap::defaults();
  std::vector<metrics::HumanHypothesis> hypotheses = metrics::default_hypotheses();
  std::vector<metrics::TraitComparison> comparisons;
  std::uint64_t dpr_seed = 42;
  double dpr_ratio = 0.9;
  std::string output_dir;

  bool operator==(const StudyConfig&) const = default;
};

/// Keys: domains (dataset -> group tag, merged over the defaults), hypotheses
/// (trait code -> high|low|task-dependent, merged over the defaults),
/// comparisons ([{trait, dataset}]), dpr ({seed, ratio}), output_dir.
/// Unknown keys are rejected.
StudyConfig parse_study_config(const nlohmann::json& doc);
nlohmann::ordered_json study_config_to_json(const StudyConfig& config);
StudyConfig load_study_config(const std::string& path);
void save_study_config(const std::string& path, const StudyConfig& config);

struct SourceDigest {
  std::string path;
  std::string fnv1a64;  // hex digest of the file bytes
};

struct Provenance {
  std::vector<SourceDigest> sources;  // sorted by digest, then path
  std::string loaded_at;              // UTC, ISO 8601
};

/// Validated study inputs. Records are kept in canonical order.
struct StudyBundle {
  std::vector<metrics::ResultRecord> records;
  std::vector<metrics::ModelSpec> models;  // sorted by name
  StudyConfig config;
  Provenance provenance;

  const metrics::ModelSpec* find_model(const std::string& name) const;
  std::vector<std::string> arch_subset() const;

  /// Equality of content, ignoring provenance.
  bool same_content(const StudyBundle& other) const {
    return records == other.records && models == other.models && config == other.config;
  }
};

struct BundlePaths {
  std::vector<std::string> records;  // .csv parsed as CSV, anything else as JSON lines
  std::string models;
  std::optional<std::string> config;
};

struct BundleLoad {
  std::optional<StudyBundle> bundle;  // empty whenever report has errors
  ValidationReport report;
};

/// Parses, merges and validates all study files. Strict mode rejects any
/// paired-design violation; lenient mode drops the offending (model, dataset)
/// blocks and records a warning for each.
BundleLoad load_bundle(const BundlePaths& paths, Strictness strictness);

// Line-oriented readers append diagnostics instead of throwing.
std::vector<metrics::ResultRecord> read_records_jsonl(std::istream& in, const std::string& file,
                                                      ValidationReport& report);
std::vector<metrics::ResultRecord> read_records_csv(std::istream& in, const std::string& file,
                                                    ValidationReport& report);
std::vector<metrics::ModelSpec> read_models_jsonl(std::istream& in, const std::string& file,
                                                  ValidationReport& report);

void write_records_jsonl(std::ostream& out, const std::vector<metrics::ResultRecord>& records);
void write_records_csv(std::ostream& out, const std::vector<metrics::ResultRecord>& records);
void write_models_jsonl(std::ostream& out, const std::vector<metrics::ModelSpec>& models);

/// Writes records, models and config as <dir>/records.jsonl, models.jsonl and
/// config.json, and returns the matching paths.
BundlePaths save_bundle(const StudyBundle& bundle, const std::string& dir);

std::string fnv1a64_hex(std::string_view bytes);

}  // namespace persona_lab::ingest
