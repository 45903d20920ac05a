#include "persona_lab/ingest/corpus_io.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "persona_lab/error.hpp"
#include "persona_lab/format.hpp"

namespace persona_lab::ingest {

using dpr::CorpusItem;
using nlohmann::json;
using nlohmann::ordered_json;

namespace {

constexpr const char* kMemoryFormat = "persona-lab-routing-memory";
constexpr int kMemoryVersion = 1;

std::string id_field(const json& obj, const char* key) {
  if (!obj.contains(key)) throw ParseError(std::string("missing key '") + key + "'");
  const json& v = obj.at(key);
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_integer()) return std::to_string(v.get<long long>());
  throw ParseError(std::string("key '") + key + "' must be a string");
}

std::map<PersonaCondition, bool> parse_outcomes(const json& obj) {
  if (!obj.is_object()) throw ParseError("'outcomes' must be an object");
  std::map<PersonaCondition, bool> out;
  for (const auto& [code, bit] : obj.items()) {
    auto p = PersonaCondition::parse(code);
    if (!p) throw ParseError("unknown persona code '" + code + "'");
    if (bit.is_boolean()) {
      out[*p] = bit.get<bool>();
    } else if (bit.is_number_integer() && (bit.get<long long>() == 0 || bit.get<long long>() == 1)) {
      out[*p] = bit.get<long long>() == 1;
    } else {
      throw ParseError("outcome for " + code + " must be 0 or 1");
    }
  }
  return out;
}

CorpusItem parse_item(const json& obj) {
  if (!obj.is_object()) throw ParseError("corpus item must be a JSON object");
  CorpusItem item;
  item.dataset = id_field(obj, "dataset");
  item.item_id = id_field(obj, "item_id");
  if (!obj.contains("text") || !obj.at("text").is_string()) throw ParseError("'text' must be a string");
  item.text = obj.at("text").get<std::string>();
  if (!obj.contains("outcomes")) throw ParseError("missing key 'outcomes'");
  item.outcomes = parse_outcomes(obj.at("outcomes"));
  try {
    dpr::check_outcomes(item);
  } catch (const InvalidArgument& e) {
    throw ParseError(e.what());
  }
  return item;
}

ordered_json item_to_json(const CorpusItem& item) {
  ordered_json obj;
  obj["dataset"] = item.dataset;
  obj["item_id"] = item.item_id;
  obj["text"] = item.text;
  ordered_json outcomes = ordered_json::object();
  for (const auto& [p, bit] : item.outcomes) outcomes[p.code()] = bit ? 1 : 0;
  obj["outcomes"] = outcomes;
  return obj;
}

std::string read_all(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

std::vector<CorpusItem> read_corpus_jsonl(std::istream& in, const std::string& file) {
  std::vector<CorpusItem> items;
  std::set<std::pair<std::string, std::string>> seen;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    try {
      CorpusItem item = parse_item(json::parse(line));
      if (!seen.insert({item.dataset, item.item_id}).second) {
        throw ParseError("duplicate item id '" + item.item_id + "' in dataset " + item.dataset);
      }
      items.push_back(std::move(item));
    } catch (const ParseError& e) {
      throw ParseError(file + ":" + std::to_string(line_no) + ": " + e.what());
    } catch (const json::exception& e) {
      throw ParseError(file + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return items;
}

std::vector<CorpusItem> load_corpus(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open corpus " + path);
  return read_corpus_jsonl(in, path);
}

void write_corpus_jsonl(std::ostream& out, const std::vector<CorpusItem>& items) {
  for (const CorpusItem& item : items) out << item_to_json(item).dump() << '\n';
}

ordered_json memories_to_json(const std::vector<dpr::RoutingMemory>& memories) {
  ordered_json doc;
  doc["format"] = kMemoryFormat;
  doc["version"] = kMemoryVersion;
  doc["memories"] = ordered_json::array();
  for (const dpr::RoutingMemory& m : memories) {
    ordered_json mem;
    mem["dataset"] = m.dataset();
    mem["split"] = {{"seed", m.seed()},
                    {"ratio", m.ratio()},
                    {"reference_count", m.reference().size()},
                    {"test_ids", m.test_ids()}};
    const dpr::TfidfIndex& index = m.index();
    mem["index"] = {{"documents", index.num_documents()},
                    {"vocabulary", index.vocabulary()},
                    {"df", index.document_frequency()},
                    {"idf", index.idf()}};
    ordered_json vectors = ordered_json::array();
    for (const dpr::SparseVector& v : index.documents()) {
      ordered_json pairs = ordered_json::array();
      for (const dpr::SparseEntry& e : v) pairs.push_back(ordered_json::array({e.term, e.weight}));
      vectors.push_back(std::move(pairs));
    }
    mem["index"]["vectors"] = std::move(vectors);
    mem["reference"] = ordered_json::array();
    for (const CorpusItem& item : m.reference()) mem["reference"].push_back(item_to_json(item));
    doc["memories"].push_back(std::move(mem));
  }
  return doc;
}

std::vector<dpr::RoutingMemory> memories_from_json(const json& doc) {
  try {
    if (doc.value("format", "") != kMemoryFormat) throw ParseError("not a routing-memory document");
    if (doc.at("version").get<int>() != kMemoryVersion) {
      throw ParseError("unsupported routing-memory version");
    }
    std::vector<dpr::RoutingMemory> out;
    for (const json& mem : doc.at("memories")) {
      std::vector<CorpusItem> reference;
      for (const json& item : mem.at("reference")) reference.push_back(parse_item(item));
      const json& idx = mem.at("index");
      std::vector<dpr::SparseVector> vectors;
      for (const json& pairs : idx.at("vectors")) {
        dpr::SparseVector v;
        for (const json& p : pairs) v.push_back({p.at(0).get<std::uint32_t>(), p.at(1).get<double>()});
        vectors.push_back(std::move(v));
      }
      if (vectors.size() != idx.at("documents").get<std::size_t>()) {
        throw ParseError("routing memory: document count disagrees with vectors");
      }
      dpr::TfidfIndex index(idx.at("vocabulary").get<std::vector<std::string>>(),
                            idx.at("df").get<std::vector<std::size_t>>(),
                            idx.at("idf").get<std::vector<double>>(), std::move(vectors));
      const json& split = mem.at("split");
      if (split.at("reference_count").get<std::size_t>() != reference.size()) {
        throw ParseError("routing memory: reference count disagrees with items");
      }
      dpr::RoutingMemory memory(std::move(reference), std::move(index),
                                split.at("seed").get<std::uint64_t>(),
                                split.at("ratio").get<double>(),
                                split.at("test_ids").get<std::vector<std::string>>());
      if (memory.dataset() != mem.at("dataset").get<std::string>()) {
        throw ParseError("routing memory: dataset label disagrees with items");
      }
      out.push_back(std::move(memory));
    }
    return out;
  } catch (const json::exception& e) {
    throw ParseError(std::string("routing memory: ") + e.what());
  } catch (const InvalidArgument& e) {
    throw ParseError(std::string("routing memory: ") + e.what());
  }
}

void save_memories(const std::string& path, const std::vector<dpr::RoutingMemory>& memories) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write routing memory " + path);
  out << memories_to_json(memories).dump(1) << '\n';
}

std::vector<dpr::RoutingMemory> load_memories(const std::string& path) {
  const std::string bytes = read_all(path);
  try {
    return memories_from_json(json::parse(bytes));
  } catch (const json::exception& e) {
    throw ParseError(path + ": " + e.what());
  }
}

}  // namespace persona_lab::ingest
