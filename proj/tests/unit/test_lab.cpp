#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "retlab/errors.hpp"
#include "retlab/lab/config.hpp"
#include "retlab/lab/experiments.hpp"
#include "retlab/lab/report.hpp"
#include "retlab/seeding.hpp"

using namespace retlab;
using namespace retlab::lab;
namespace fs = std::filesystem;

namespace {

std::string message_of(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ConfigInvalid& e) {
    return e.what();
  }
  return "";
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("retlab_test_" + name);
  fs::remove_all(p);
  return p;
}

}  // namespace

TEST(Config, HypothesisGating) {
  EXPECT_NE(message_of(R"({"id":"x","theorem":"B","a":0.6,"N":10,"seeds":[1]})").find("a < 1/2"), std::string::npos);
  EXPECT_NE(message_of(R"({"id":"x","theorem":"C","a":0.1,"c":1.5,"N":10,"seeds":[1]})").find("1/14"),
            std::string::npos);
  EXPECT_NE(message_of(R"({"id":"x","theorem":"C","a":0.05,"c":1,"N":10,"seeds":[1]})").find("c > 1"),
            std::string::npos);
  EXPECT_NE(message_of(R"({"id":"x","theorem":"D","a":0.2,"b":0.2,"N":10,"seeds":[1]})").find("b + 2a"),
            std::string::npos);
  EXPECT_NE(message_of(R"({"id":"x","theorem":"A","a":1,"N":10,"seeds":[1]})").find("(0, 1)"), std::string::npos);
  EXPECT_NE(message_of(R"({"id":"x","theorem":"lln","a":0.4,"N":10,"seeds":[]})").find("seed list is empty"),
            std::string::npos);
  EXPECT_NE(message_of(R"({"id":"x","theorem":"lln","a":0.4,"N":10,"seeds":[1],"colour":1})").find("colour"),
            std::string::npos);
  EXPECT_NE(message_of(R"({"id":"x","theorem":"E"})").find("unknown theorem"), std::string::npos);
  EXPECT_EQ(message_of(R"({"id":"x","theorem":"D","a":"1/5","b":"1/20","N":10,"seeds":[1]})"), "");
}

TEST(Config, SeedDerivation) {
  const auto cfg = parse_config(R"({"id":"x","theorem":"lln","a":0.4,"N":10,"seed":5,"seed_count":4})");
  ASSERT_EQ(cfg.seeds.size(), 4u);
  for (std::uint64_t i = 0; i < 4; ++i) EXPECT_EQ(cfg.seeds[i], derive_seed(5, i));
  const auto more = parse_config(R"({"id":"x","theorem":"lln","a":0.4,"N":10,"seed":5,"seed_count":6})");
  EXPECT_TRUE(std::equal(cfg.seeds.begin(), cfg.seeds.end(), more.seeds.begin()));
  EXPECT_EQ(parse_config(R"({"id":"x","theorem":"lln","a":"2/5","N":10,"seeds":[1]})").canonical_json(),
            parse_config(R"({"theorem":"lln","id":"x","N":10,"a":0.4,"seeds":[1]})").canonical_json());
}

TEST(Run, LlnRecord) {
  auto cfg = parse_config(R"({"id":"lln-small","theorem":"lln","a":0.4,"N":100000,"seed":1,"seed_count":10,
                              "params":{"assert":"tail"}})");
  const RunResult r = run_experiment(cfg);
  EXPECT_EQ(r.record.trials.size(), 10u);
  EXPECT_EQ(r.record.undecided, 0u);
  ASSERT_EQ(r.record.assertions.size(), 1u);
  EXPECT_EQ(r.record.assertions[0].threshold, 0.05);
  EXPECT_EQ(r.record.passed(), r.record.metrics.at("max_tail_deviation") <= 0.05);
}

TEST(Run, ExactLemma) {
  const auto cfg = parse_config(R"({"id":"p1","theorem":"lemma-prop1","a":"1/2","r":2,"N":48})");
  const RunResult r = run_experiment(cfg);
  EXPECT_TRUE(r.record.passed());
  EXPECT_EQ(r.record.metrics.at("failures"), 0.0);
  EXPECT_GT(r.record.metrics.at("tuples_checked"), 1000.0);
}

TEST(Run, ByteIdenticalOutputs) {
  const auto cfg = parse_config(R"({"id":"det","theorem":"A","a":0.3,"N":20000,"seed":4,"seed_count":3,
                                    "x_panel":2,"workers":1})");
  auto cfg2 = cfg;
  cfg2.workers = 3;
  const fs::path a = scratch("det_a"), b = scratch("det_b");
  write_run(run_experiment(cfg), a.string());
  write_run(run_experiment(cfg2), b.string());
  EXPECT_EQ(slurp(a / "traces.csv"), slurp(b / "traces.csv"));
  EXPECT_FALSE(slurp(a / "traces.csv").empty());
  const RunRecord ra = record_from_json(slurp(a / "record.json"));
  const RunRecord rb = record_from_json(slurp(b / "record.json"));
  EXPECT_EQ(ra.metrics, rb.metrics);
  EXPECT_EQ(ra.config_hash, rb.config_hash);  // the worker count does not enter the hash
}

TEST(RecordJson, RoundTrip) {
  RunRecord r;
  r.id = "x";
  r.theorem = "vdc";
  r.config_hash = fnv1a_hex("{}");
  r.config_json = "{}";
  r.version = "1.0";
  r.wall_seconds = 0.25;
  r.undecided = 2;
  r.metrics = {{"m", 0.1}, {"n", 1e300}};
  r.trials.push_back({7, {{"v", -0.5}}});
  r.assertions.push_back({"name", true, 1.0, 2.0, "d"});
  const std::string text = record_to_json(r);
  EXPECT_EQ(record_to_json(record_from_json(text)), text);
}

TEST(Report, OrderingAndConflicts) {
  auto make = [](std::string id, std::string version, std::uint64_t seed) {
    RunRecord r;
    r.id = id;
    r.theorem = "lln";
    r.config_json = R"({"a":"2/5"})";
    r.config_hash = fnv1a_hex(r.config_json);
    r.version = version;
    r.trials.push_back({seed, {{"final_deviation", 0.01 * static_cast<double>(seed)}}});
    return r;
  };
  const Report one = build_report({make("a", "1", 2)});
  EXPECT_EQ(one.records.size(), 1u);
  EXPECT_EQ(record_to_json(one.records[0]), record_to_json(make("a", "1", 2)));
  EXPECT_FALSE(one.version_conflict);

  const Report two = build_report({make("b", "1", 9), make("a", "1", 3)});
  const Report swapped = build_report({make("a", "1", 3), make("b", "1", 9)});
  EXPECT_EQ(two.summary.to_csv(), swapped.summary.to_csv());
  EXPECT_NE(two.summary.to_csv().find(",3,"), std::string::npos);
  EXPECT_NE(two.summary.to_csv().find(",9,"), std::string::npos);
  EXPECT_TRUE(two.warning.empty());

  const Report mixed = build_report({make("a", "1", 1), make("b", "2", 1)});
  EXPECT_TRUE(mixed.version_conflict);
  EXPECT_FALSE(mixed.warning.empty());
}
