#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "osim/config.hpp"
#include "osim/error.hpp"
#include "osim/harness.hpp"

using namespace osim;
using namespace osim::harness;
using io::Json;

namespace {

config::ExperimentConfig cfg(const std::string& text) { return config::parse_config(Json::parse(text)); }

Report run(const std::string& text) {
  const auto c = cfg(text);
  return verify_scenario(lookup_scenario(*c.scenario), c);
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST(Catalog, Complete) {
  const auto& all = list_scenarios();
  EXPECT_EQ(all.size(), 37u);
  std::set<std::string> ids;
  for (const auto& s : all) ids.insert(s.id);
  EXPECT_EQ(ids.size(), 37u);
  for (const char* id : {"T4.1a", "L5.1", "T5.8", "T5.9e"}) EXPECT_TRUE(ids.count(id)) << id;
}

TEST(Catalog, Lookup) {
  const auto& s = lookup_scenario("T4.4c");
  EXPECT_EQ(s.relation, orderings::Relation::disp_multi);
  EXPECT_EQ(s.hypotheses.size(), 3u);
  try {
    lookup_scenario("T9.9");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::UnknownScenario);
  }
}

TEST(Config, MissingSeed) {
  try {
    cfg(R"({"N": 1000})");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::ConfigParse);
    EXPECT_NE(std::string(e.what()).find("\"seed\""), std::string::npos);
  }
}

TEST(Config, Rejections) {
  EXPECT_THROW(cfg(R"({"seed": 1, "N": 10})"), Error);
  EXPECT_THROW(cfg(R"({"seed": 1, "sed": 2})"), Error);
  EXPECT_THROW(cfg(R"({"seed": 1, "generator": {"name": "ex62", "params": [0.5]}})"), Error);
  EXPECT_THROW(cfg(R"({"seed": 1, "model": {"type": "tree"}})"), Error);
  EXPECT_THROW(cfg(R"({"seed": 1, "gr_n": "middle"})"), Error);
}

TEST(Config, BatchInheritsTopLevel) {
  const auto b = config::parse_config_batch(
      Json::parse(R"({"seed": 5, "N": 2000, "batch": [{"scenario": "T5.3a"}, {"scenario": "T5.9a", "seed": 6}]})"));
  ASSERT_EQ(b.size(), 2u);
  EXPECT_EQ(b[0].seed, 5u);
  EXPECT_EQ(b[0].N, 2000u);
  EXPECT_EQ(b[1].seed, 6u);
}

TEST(Config, PhrDistribution) {
  const auto d = config::parse_distribution(
      Json::parse(R"({"phr": {"base": {"name": "exponential", "params": [1]}, "alpha": 3}})"));
  EXPECT_NEAR(d.survival(1.0), std::exp(-3.0), 1e-15);
}

TEST(Verify, T44aHolds) {
  const auto r = run(R"({"seed": 42, "scenario": "T4.4a", "generator": {"name": "ex61", "params": [0.5]},
      "distributions": [{"name": "exponential", "params": [2]}],
      "distributions_g": [{"name": "exponential", "params": [1]}]})");
  EXPECT_EQ(r.verdict, Status::Holds);
  EXPECT_EQ(r.conclusion.relation, "st_multi");
}

TEST(Verify, LiteralSwapIsGated) {
  const auto r = run(R"({"seed": 42, "scenario": "T4.4a",
      "distributions": [{"name": "exponential", "params": [1]}],
      "distributions_g": [{"name": "exponential", "params": [2]}]})");
  EXPECT_EQ(r.verdict, Status::Inconclusive);
  bool failed = false;
  for (const auto& h : r.hypotheses) failed = failed || h.status != Status::Holds;
  EXPECT_TRUE(failed);
}

TEST(Verify, ClaytonGatedUnderT41b) {
  const auto r = run(R"({"seed": 42, "scenario": "T4.1b", "generator": {"name": "clayton", "params": [2]}})");
  EXPECT_EQ(r.verdict, Status::Inconclusive);
  EXPECT_NE(r.conclusion.note.find("failing hypothesis R_RATIO_POS_INC"), std::string::npos);
}

TEST(Verify, GosNeedsIndependence) {
  try {
    run(R"({"seed": 1, "scenario": "T5.9a", "generator": {"name": "gumbel", "params": [1.5]}})");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::PresetNeedsIndependence);
  }
}

TEST(Verify, GammaExampleHypothesis) {
  const auto r = run(R"({"seed": 42, "scenario": "T5.9a", "gamma": [3, 2, 1], "gamma_prime": [2.5, 2, 1], "index": 3})");
  ASSERT_FALSE(r.hypotheses.empty());
  EXPECT_EQ(r.hypotheses[0].status, Status::Holds);
  EXPECT_NE(r.verdict, Status::Violated);
}

// With m_n < 0 the step powers alpha differ between the n and n+1 models, and
// under a dependent generator the (b) parts of these theorems fail.
TEST(Counterexample, ClaytonStepLawsWithNegativeMn) {
  const auto r = run(R"({"seed": 42, "scenario": "T5.3b", "generator": {"name": "clayton", "params": [2]},
      "model": {"type": "dgos", "m": [0, 0, -0.5]}})");
  EXPECT_EQ(r.verdict, Status::Violated);
}

TEST(Counterexample, JoeReversedHazard) {
  const auto r = run(R"({"seed": 42, "scenario": "T5.5b", "model": {"type": "dgos", "m": [0, 0, -0.5]}})");
  EXPECT_EQ(r.verdict, Status::Violated);
}

TEST(Counterexample, IndependenceUnaffected) {
  const auto r = run(R"({"seed": 42, "scenario": "T5.3b", "generator": {"name": "independence"},
      "model": {"type": "dgos", "m": [0, 0, -0.5]}})");
  EXPECT_EQ(r.verdict, Status::Holds);
}

TEST(Export, CanonicalAndDeterministic) {
  const auto r1 = run(R"({"seed": 3, "N": 5000, "scenario": "T5.3a"})");
  const auto r2 = run(R"({"seed": 3, "N": 5000, "scenario": "T5.3a"})");
  const auto j1 = export_report(r1, ReportFormat::json);
  EXPECT_EQ(j1, export_report(r2, ReportFormat::json));
  const auto parsed = Json::parse(j1);
  EXPECT_EQ(parsed["scenario"], "T5.3a");
  EXPECT_EQ(parsed["tool_version"], kToolVersion);
  EXPECT_EQ(Json::parse(io::canonical_dump(parsed)), parsed);
  const auto csv = export_report(r1, ReportFormat::csv_summary);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), kCsvHeader);
}

TEST(Export, CanonicalDump) {
  Json j;
  j["b"] = 0.1;
  j["a"] = std::nan("");
  EXPECT_EQ(io::canonical_dump(j, -1), R"({"a":null,"b":0.10000000000000001})");
}

TEST(Run, BatchOutputsAndExitCodes) {
  const auto dir = std::filesystem::temp_directory_path() / "osim_harness_test";
  std::filesystem::remove_all(dir);
  auto configs = config::parse_config_batch(Json::parse(
      R"({"seed": 9, "N": 5000, "batch": [{"scenario": "T5.3a"}, {"scenario": "T5.3a", "reverse": true}, {"scenario": "T4.1b", "generator": {"name": "clayton", "params": [2]}}]})"));
  auto entries = run_batch(configs, {});
  ASSERT_EQ(entries.size(), 3u);
  EXPECT_EQ(entries[0].report->verdict, Status::Holds);
  EXPECT_EQ(entries[1].report->verdict, Status::Violated);
  EXPECT_EQ(entries[2].report->verdict, Status::Inconclusive);
  EXPECT_EQ(write_outputs(entries, dir.string()), 2);
  EXPECT_TRUE(std::filesystem::exists(dir / "index.json"));
  EXPECT_TRUE(std::filesystem::exists(dir / "summary.csv"));
  EXPECT_NE(entries[0].file, entries[1].file);
  const auto index = Json::parse(slurp(dir / "index.json"));
  EXPECT_EQ(index["exit_code"], 2);

  std::vector<RunEntry> only_inconclusive = {entries[2]};
  EXPECT_EQ(exit_code(only_inconclusive), 3);
  std::vector<RunEntry> with_error = {entries[1], RunEntry{"T5.3a", std::nullopt, "boom", ""}};
  EXPECT_EQ(exit_code(with_error), 1);
  std::vector<RunEntry> ok = {entries[0]};
  EXPECT_EQ(exit_code(ok), 0);
  std::filesystem::remove_all(dir);
}

TEST(Run, ErrorsRecordedPerEntry) {
  auto configs = config::parse_config_batch(
      Json::parse(R"({"seed": 9, "N": 5000, "batch": [{"scenario": "T9.9"}, {"scenario": "T5.3a"}]})"));
  const auto entries = run_batch(configs, {});
  ASSERT_EQ(entries.size(), 2u);
  EXPECT_FALSE(entries[0].report.has_value());
  EXPECT_FALSE(entries[0].error.empty());
  EXPECT_TRUE(entries[1].report.has_value());
}
