// Copyright 2026 The emoint Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <map>
#include <set>
#include <string>

#include <sys/wait.h>

#include <gtest/gtest.h>

#include "json.hpp"

#include "emoint/annostore/rating.h"
#include "emoint/annostore/store.h"
#include "emoint/common/csv.h"
#include "emoint/common/error.h"
#include "emoint/common/files.h"
#include "emoint/dataprep/splits.h"
#include "emoint/dataprep/text_record.h"
#include "emoint/evaluation/predictions.h"
#include "emoint/llmrun/run.h"
#include "emoint/pipeline/config.h"
#include "emoint/pipeline/stages.h"
#include "emoint/pipeline/synthetic.h"

namespace emoint::pipeline {
namespace {

using nlohmann::json;

json SmallConfigJson() {
  return json::parse(R"({
    "paths": {"corpus": "corpus.jsonl", "lexicon": "lexicon.csv",
              "artifacts": "art", "exports": "exp", "runs": "runs"},
    "seeds": {"sample": 1, "plan": 2, "simulate": 3, "split": 4, "kfold": 5},
    "sampling": {"n_weighted": 80, "n_uniform": 20},
    "plan": {"sets": 5, "set_size": 20, "raters_per_set": 5,
             "annotator_count": 6},
    "llm": {"provider": "stub", "model": "stub-model", "run_id": "main",
            "base_delay_ms": 1},
    "server": {"store": "store.sqlite", "port": 0},
    "prices": {"stub-model": {"input_per_million": 1, "output_per_million": 2}}
  })");
}

void WriteLexicon(const fs::path& path) {
  csv::Table t;
  t.header = {"stem", "valence", "arousal", "dominance"};
  for (const auto& e : SyntheticLexicon()) {
    t.rows.push_back({e.stem, std::to_string(e.valence),
                      std::to_string(e.arousal), std::to_string(e.dominance)});
  }
  csv::Write(path, t);
}

class Workspace : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("emoint_pipeline_" +
            std::string(::testing::UnitTest::GetInstance()
                            ->current_test_info()
                            ->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
    dataprep::WriteCorpus(dir_ / "corpus.jsonl", SyntheticCorpus(500, 7));
    WriteLexicon(dir_ / "lexicon.csv");
  }
  void TearDown() override { fs::remove_all(dir_); }

  PipelineConfig Config(const json& patch = json::object()) const {
    json j = SmallConfigJson();
    j.merge_patch(patch);
    return ConfigFromJson(j, dir_);
  }

  fs::path dir_;
};

std::set<fs::path> ListTree(const fs::path& root) {
  std::set<fs::path> out;
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    out.insert(e.path());
  }
  return out;
}

std::map<std::string, std::string> OutputHashes(const json& manifest) {
  std::map<std::string, std::string> out;
  for (const json& o : manifest.at("outputs")) {
    out[o.at("path").get<std::string>()] = o.at("sha256").get<std::string>();
  }
  return out;
}

TEST(ConfigTest, RejectsUnknownKeysAndMissingSeeds) {
  json j = SmallConfigJson();
  j["sampling"]["n_weigthed"] = 5;
  try {
    ConfigFromJson(j, "/tmp");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kConfigError);
    EXPECT_NE(std::string(e.what()).find("n_weigthed"), std::string::npos);
  }
  j = SmallConfigJson();
  j["seeds"].erase("plan");
  try {
    ConfigFromJson(j, "/tmp");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kConfigError);
  }
}

TEST(ConfigTest, DefaultsMatchFullScale) {
  json j = SmallConfigJson();
  j.erase("sampling");
  j.erase("plan");
  const PipelineConfig c = ConfigFromJson(j, "/tmp");
  EXPECT_EQ(c.sampling.n_weighted, 8000u);
  EXPECT_EQ(c.sampling.n_uniform, 2000u);
  EXPECT_EQ(c.plan.sets, 100u);
  EXPECT_EQ(c.plan.set_size, 100u);
  EXPECT_EQ(c.plan.raters_per_set, 5u);
  EXPECT_EQ(c.shots.basic, 3);
  EXPECT_EQ(c.shots.dimensional, 2);
}

TEST(ConfigTest, RoundTripsThroughJson) {
  const PipelineConfig a = ConfigFromJson(SmallConfigJson(), "/base");
  const PipelineConfig b = ConfigFromJson(ConfigToJson(a), "/base");
  EXPECT_EQ(ConfigToJson(a), ConfigToJson(b));
}

TEST(ConfigTest, ShippedExampleValidatesWithoutSideEffects) {
  const fs::path root = EMOINT_SOURCE_DIR;
  const auto before = ListTree(root / "config");
  const bool work_existed = fs::exists(root / "work");
  const auto work_before =
      work_existed ? ListTree(root / "work") : std::set<fs::path>{};
  const PipelineConfig c = LoadConfig(root / "config" / "example.json");
  EXPECT_NO_THROW(ValidateConfig(c));
  EXPECT_EQ(ListTree(root / "config"), before);
  EXPECT_EQ(fs::exists(root / "work"), work_existed);
  if (work_existed) EXPECT_EQ(ListTree(root / "work"), work_before);
}

TEST_F(Workspace, ValidateCatchesIncoherentPlan) {
  auto c = Config({{"plan", {{"sets", 4}}}});
  EXPECT_THROW(ValidateConfig(c), Error);
  c = Config({{"paths", {{"corpus", "missing.jsonl"}}}});
  try {
    ValidateConfig(c);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kConfigError);
  }
}

TEST_F(Workspace, EvalBeforeAnnotateIsMissingUpstream) {
  const auto c = Config();
  for (const char* s : {"ingest", "clean", "score-lexicon", "sample", "plan",
                        "simulate-ratings", "split"}) {
    RunStage(s, c);
  }
  try {
    RunStage("eval", c);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kMissingUpstream);
    EXPECT_NE(std::string(e.what()).find("annotate-llm"), std::string::npos);
  }
}

TEST_F(Workspace, FirstStageOnEmptyWorkspaceNeedsNothingElse) {
  const auto c = Config();
  try {
    RunStage("clean", c);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kMissingUpstream);
    EXPECT_NE(std::string(e.what()).find("ingest"), std::string::npos);
  }
}

TEST_F(Workspace, FullChainIsDeterministicAndManifestsCoverArtifacts) {
  const auto c = Config();
  const json first = RunAll(c);
  ASSERT_EQ(first.size(), OfflineChain().size());

  // Stage outputs exist and look like what downstream expects.
  const auto sample = dataprep::ReadCorpus(c.Artifact("sample.jsonl"));
  EXPECT_EQ(sample.size(), 100u);
  const auto ratings = annostore::ReadExport(c.ExportPath());
  EXPECT_EQ(ratings.size(), 500u);
  const auto splits = dataprep::ReadSplits(c.Artifact("splits.csv"));
  std::size_t test = 0;
  for (const auto& s : splits) test += s.partition == dataprep::Partition::kTest;
  EXPECT_EQ(test, 10u);
  const auto outcomes = llmrun::LoadOutcomes(c.RunsDir() / "main" / "outcomes.jsonl");
  EXPECT_EQ(outcomes.size(), 80u);
  EXPECT_TRUE(fs::exists(c.Artifact("eval/comparison.txt")));

  // Rerunning every stage with unchanged inputs reproduces every output.
  const json second = RunAll(c);
  for (std::size_t i = 0; i < first.size(); ++i) {
    EXPECT_EQ(OutputHashes(first[i]), OutputHashes(second[i]))
        << first[i]["stage"];
  }
  EXPECT_EQ(second[10]["params"]["queried"], 0);

  // Every artifact is an output of some manifest.
  std::set<std::string> listed;
  std::map<std::string, std::set<std::string>> deps;
  for (const json& m : LoadManifests(c)) {
    std::string name = m["stage"];
    if (m.contains("run_id")) name += ":" + m["run_id"].get<std::string>();
    for (const json& o : m["outputs"]) listed.insert(o["path"]);
    for (const json& a : m["attached"]) listed.insert(a.get<std::string>());
    for (const json& in : m["inputs"]) deps[name].insert(in["stage"]);
  }
  for (const fs::path& root : {c.Resolve("art"), c.Resolve("exp"),
                               c.Resolve("runs")}) {
    for (const auto& e : fs::recursive_directory_iterator(root)) {
      if (!e.is_regular_file()) continue;
      if (e.path().parent_path() == c.ManifestDir()) continue;
      const std::string rel = e.path().lexically_relative(dir_).string();
      EXPECT_TRUE(listed.count(rel)) << rel;
    }
  }
  // Depth-first search for a cycle in the stage dependency graph.
  std::map<std::string, int> state;
  std::function<bool(const std::string&)> cyclic = [&](const std::string& v) {
    if (state[v] == 1) return true;
    if (state[v] == 2) return false;
    state[v] = 1;
    for (const auto& u : deps[v]) {
      if (cyclic(u)) return true;
    }
    state[v] = 2;
    return false;
  };
  for (const auto& [v, _] : deps) EXPECT_FALSE(cyclic(v)) << v;
}

TEST_F(Workspace, SeedOverrideChangesOnlyThatStage) {
  const auto c = Config();
  for (const char* s : {"ingest", "clean", "score-lexicon"}) RunStage(s, c);
  const json a = RunStage("sample", c);
  StageOptions o;
  o.seed = 99;
  const json b = RunStage("sample", c, o);
  EXPECT_EQ(b["seed"], 99);
  EXPECT_NE(OutputHashes(a), OutputHashes(b));
  EXPECT_EQ(a["inputs"], b["inputs"]);
}

TEST_F(Workspace, ServeImportsAndExportReadsTheStore) {
  setenv("EMOINT_TOKEN_SECRET", "test-secret", 1);
  const auto c = Config();
  for (const char* s : {"ingest", "clean", "score-lexicon", "sample", "plan"}) {
    RunStage(s, c);
  }
  RunStage("serve", c);
  {
    annostore::AnnotationStore store(c.StorePath().string());
    EXPECT_TRUE(store.CheckToken("a01", AnnotatorToken("a01")));
    EXPECT_FALSE(store.CheckToken("a01", "guess"));
    const auto progress = store.Progress("a01");
    ASSERT_FALSE(progress.empty());
    const auto next = store.Next("a01", progress[0].set_id);
    ASSERT_TRUE(next.text_id);
    annostore::RatingRecord r;
    r.annotator_id = "a01";
    r.text_id = *next.text_id;
    r.set_id = progress[0].set_id;
    r.labels = {0, 1, 2, 3, 4, 0, 3, 3};
    r.status = annostore::RatingStatus::kFinal;
    store.Submit(r);
  }
  const json m = RunStage("export", c);
  EXPECT_EQ(m["inputs"][0]["stage"], "serve");
  const auto finals = annostore::ReadExport(c.ExportPath());
  ASSERT_EQ(finals.size(), 1u);
  EXPECT_EQ(finals[0].labels[4], 4);
  unsetenv("EMOINT_TOKEN_SECRET");
}

TEST_F(Workspace, ServeWithoutSecretFailsBeforeTouchingStore) {
  unsetenv("EMOINT_TOKEN_SECRET");
  const auto c = Config();
  for (const char* s : {"ingest", "clean", "score-lexicon", "sample", "plan"}) {
    RunStage(s, c);
  }
  EXPECT_THROW(RunStage("serve", c), Error);
  EXPECT_FALSE(fs::exists(c.StorePath()));
}

TEST_F(Workspace, SweepAndFoldReports) {
  const auto c = Config();
  for (const char* s : {"ingest", "clean", "score-lexicon", "sample", "plan",
                        "simulate-ratings", "split", "shots"}) {
    RunStage(s, c);
  }
  StageOptions sweep;
  for (int k : {0, 1, 2, 3}) {
    StageOptions o;
    o.run_id = "k" + std::to_string(k);
    o.shots_basic = k;
    o.shots_dimensional = k;
    const json m = RunStage("annotate-llm", c, o);
    EXPECT_EQ(m["run_id"], o.run_id.value());
    sweep.sweep_runs[k] = *o.run_id;
  }
  const json m = RunStage("sweep-report", c, sweep);
  EXPECT_TRUE(m["params"]["selected_k"].is_number_integer());
  const std::string table = ReadFile(c.Artifact("sweep/basic.txt"));
  EXPECT_NE(table.find("Zero Shot"), std::string::npos);
  EXPECT_NE(table.find("Three Shot"), std::string::npos);
  EXPECT_NE(table.find("Selected:"), std::string::npos);

  std::string folds = "fold,happiness,valence\n";
  for (int i = 0; i < 10; ++i) {
    folds += std::to_string(i) + "," + std::to_string(0.80 + 0.01 * (i % 3)) +
             "," + std::to_string(0.70 + 0.02 * (i % 2)) + "\n";
  }
  WriteFile(dir_ / "folds.csv", folds);
  StageOptions fo;
  fo.folds = dir_ / "folds.csv";
  RunStage("fold-report", c, fo);
  const std::string fold_table = ReadFile(c.Artifact("folds/summary.txt"));
  EXPECT_NE(fold_table.find("CI 95%"), std::string::npos);
  EXPECT_NE(fold_table.find("Happiness"), std::string::npos);
}

TEST_F(Workspace, ExternalPredictionsJoinTheComparison) {
  const auto c = Config();
  for (const char* s : {"ingest", "clean", "score-lexicon", "sample", "plan",
                        "simulate-ratings", "split", "shots", "annotate-llm"}) {
    RunStage(s, c);
  }
  // A perfect "supervised" source: the reference means themselves.
  std::map<std::string, MetricArray> means;
  for (const auto& [id, agg] :
       annostore::AggregateAll(annostore::ReadExport(c.ExportPath()))) {
    means[id] = agg.mean;
  }
  evaluation::WritePredictions(
      dir_ / "oracle.csv", evaluation::PredictionsFromMeans(means, "oracle"));
  StageOptions o;
  o.runs = {"main"};
  o.predictions = {{"oracle", dir_ / "oracle.csv"}};
  RunStage("eval", c, o);
  const json report = ReadJson(c.Artifact("eval/oracle.json"));
  for (const json& m : report["metrics"]) {
    if (!m["pearson_r"].is_null()) {
      EXPECT_NEAR(m["pearson_r"].get<double>(), 1.0, 1e-12);
    }
  }
  const std::string csv = ReadFile(c.Artifact("eval/comparison.csv"));
  EXPECT_NE(csv.find("oracle"), std::string::npos);
  EXPECT_NE(csv.find("main"), std::string::npos);
}

// ---- binary ---------------------------------------------------------------

struct Completed {
  int status = 0;
  std::string out;
};

Completed RunCli(const std::string& args) {
  const std::string cmd = std::string(EMOINT_CLI_PATH) + " " + args + " 2>&1";
  Completed c;
  FILE* pipe = popen(cmd.c_str(), "r");
  char buf[4096];
  while (pipe && fgets(buf, sizeof buf, pipe)) c.out += buf;
  const int raw = pipe ? pclose(pipe) : -1;
  c.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  return c;
}

TEST_F(Workspace, CliReportsErrorsAsJson) {
  WriteJson(dir_ / "config.json", SmallConfigJson());
  const std::string cfg = "--config " + (dir_ / "config.json").string();
  const Completed v = RunCli(cfg + " validate");
  EXPECT_EQ(v.status, 0) << v.out;
  EXPECT_NE(v.out.find("\"valid\": true"), std::string::npos);

  const Completed e = RunCli(cfg + " eval");
  EXPECT_EQ(e.status, 3) << e.out;
  const json err = json::parse(e.out);
  EXPECT_EQ(err["error"], "MissingUpstream");
  EXPECT_EQ(err["stage"], "eval");

  const Completed bad = RunCli(cfg + " run --stage nonsense");
  EXPECT_EQ(bad.status, 2);
  EXPECT_EQ(json::parse(bad.out)["error"], "ConfigError");

  const Completed ingest = RunCli(cfg + " --seed 3 ingest");
  EXPECT_EQ(ingest.status, 0) << ingest.out;
  EXPECT_EQ(json::parse(ingest.out)["stage"], "ingest");
}

}  // namespace
}  // namespace emoint::pipeline
