#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "persona_lab/dpr/routing.hpp"

namespace persona_lab::ingest {

/// JSON lines with keys dataset, item_id, text, outcomes (persona code -> 0/1).
/// Throws ParseError naming the line on malformed input, unknown persona
/// codes, missing polarity outcomes or duplicate (dataset, item_id) pairs.
std::vector<dpr::CorpusItem> read_corpus_jsonl(std::istream& in, const std::string& file);
std::vector<dpr::CorpusItem> load_corpus(const std::string& path);
void write_corpus_jsonl(std::ostream& out, const std::vector<dpr::CorpusItem>& items);

/// Self-describing routing-memory document (one entry per dataset). Reals are
/// written in shortest round-trip form, so load(save(x)) == x.
nlohmann::ordered_json memories_to_json(const std::vector<dpr::RoutingMemory>& memories);
std::vector<dpr::RoutingMemory> memories_from_json(const nlohmann::json& doc);
void save_memories(const std::string& path, const std::vector<dpr::RoutingMemory>& memories);
std::vector<dpr::RoutingMemory> load_memories(const std::string& path);

}  // namespace persona_lab::ingest
