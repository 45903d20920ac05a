#include <gtest/gtest.h>

#include <sstream>

#include "fixtures.hpp"
#include "persona_lab/error.hpp"
#include "persona_lab/ingest/corpus_io.hpp"

using namespace persona_lab;
using namespace persona_lab::ingest;

TEST(Corpus, JsonLinesRoundTrip) {
  const auto items = testkit::make_cluster_corpus(1, 4);
  std::ostringstream out;
  write_corpus_jsonl(out, items);
  std::istringstream in(out.str());
  EXPECT_EQ(read_corpus_jsonl(in, "c.jsonl"), items);
}

TEST(Corpus, ParseErrorsNameTheLine) {
  const std::string good =
      R"({"dataset":"d","item_id":"1","text":"t","outcomes":{"A_H":1,"A_L":0,"C_H":0,"C_L":0,"E_H":0,"E_L":0,"N_H":0,"N_L":0,"O_H":0,"O_L":1}})";
  auto expect_error = [](const std::string& text, const std::string& needle) {
    std::istringstream in(text);
    try {
      read_corpus_jsonl(in, "c.jsonl");
      ADD_FAILURE() << "no error for " << needle;
    } catch (const ParseError& e) {
      EXPECT_NE(std::string(e.what()).find(needle), std::string::npos) << e.what();
    }
  };
  {
    std::istringstream in(good + "\n");
    EXPECT_EQ(read_corpus_jsonl(in, "c.jsonl").size(), 1u);
  }
  expect_error(good + "\n" + good + "\n", "c.jsonl:2");
  expect_error("\n{oops\n", "c.jsonl:2");
  std::string missing = good;
  missing.replace(missing.find(",\"O_L\":1"), 8, "");
  expect_error(missing, "c.jsonl:1");
  std::string unknown = good;
  unknown.replace(unknown.find("A_H"), 3, "X_H");
  expect_error(unknown, "c.jsonl:1");
}

TEST(Memories, JsonRoundTripIsExact) {
  const auto dir = testkit::fresh_dir("memories");
  std::vector<dpr::RoutingMemory> mems;
  for (const char* ds : {"alpha", "beta"}) {
    auto split = dpr::split_reference_test(testkit::make_cluster_corpus(2, 12, ds), 0.9, 5);
    std::vector<std::string> test_ids;
    for (const auto& t : split.test) test_ids.push_back(t.item_id);
    mems.push_back(dpr::RoutingMemory::build(split.reference, 5, 0.9, test_ids));
  }
  save_memories(dir + "/m.json", mems);
  const auto back = load_memories(dir + "/m.json");
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back[0], mems[0]);
  EXPECT_EQ(back[1], mems[1]);
  EXPECT_EQ(back[0].fallback_persona(), mems[0].fallback_persona());
  save_memories(dir + "/m2.json", back);
  EXPECT_EQ(testkit::read_file(dir + "/m.json"), testkit::read_file(dir + "/m2.json"));

  const auto doc = memories_to_json(mems);
  EXPECT_EQ(doc["format"], "persona-lab-routing-memory");
  EXPECT_EQ(doc["version"], 1);
}

TEST(Memories, RejectsForeignDocuments) {
  EXPECT_THROW(memories_from_json(nlohmann::json::parse(R"({"format":"other","version":1,"memories":[]})")),
               ParseError);
  EXPECT_THROW(memories_from_json(nlohmann::json::parse(R"({"format":"persona-lab-routing-memory","version":2,"memories":[]})")),
               ParseError);
  const auto dir = testkit::fresh_dir("memories_bad");
  testkit::write_file(dir + "/bad.json", "{not json");
  EXPECT_THROW(load_memories(dir + "/bad.json"), ParseError);
  EXPECT_THROW(load_memories(dir + "/absent.json"), IoError);
}
