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

#ifndef EMOINT_PIPELINE_CONFIG_H_
#define EMOINT_PIPELINE_CONFIG_H_

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "emoint/llmrun/run.h"

namespace emoint::pipeline {

namespace fs = std::filesystem;

struct PathsConfig {
  fs::path corpus;
  fs::path lexicon;
  fs::path artifacts = "artifacts";
  fs::path exports = "exports";
  fs::path runs = "runs";
};

// Every stage that draws random numbers has its own seed; none defaults.
struct SeedConfig {
  std::uint64_t sample = 0;
  std::uint64_t plan = 0;
  std::uint64_t simulate = 0;
  std::uint64_t split = 0;
  std::uint64_t kfold = 0;
};

struct CleaningConfig {
  std::vector<std::string> split_platforms = {"facebook"};
  std::size_t max_chars = 280;
  std::string stemmer = "suffix";
};

struct SamplingConfig {
  std::size_t n_weighted = 8000;
  std::size_t n_uniform = 2000;
};

struct PlanConfig {
  std::size_t sets = 100;
  std::size_t set_size = 100;
  std::size_t raters_per_set = 5;
  std::size_t sets_per_week = 5;
  std::size_t weeks = 5;
  std::vector<std::string> annotators;
};

struct SimulationConfig {
  // Latent spread across texts and rater noise, in raw label units.
  double sigma_between = 0.9;
  double sigma_within = 0.6;
  double emotion_mean = 1.0;
  double dimension_mean = 3.0;
};

struct SplitConfig {
  double test_frac = 0.10;
  double val_frac = 0.10;
  bool include_dimensions = false;
};

struct KfoldConfig {
  int k = 10;
  int train_ratio = 889;
  int val_ratio = 111;
};

struct EmbeddingConfig {
  // "local" hashes tokens offline; "http" calls an embeddings endpoint.
  std::string provider = "local";
  std::string url;
  std::string model;
  std::size_t dimension = 256;
  std::size_t batch_size = 64;
  std::size_t parallelism = 4;
};

struct ShotsConfig {
  int basic = 3;
  int dimensional = 2;
  EmbeddingConfig embedding;
};

struct LlmConfig {
  // "http" talks to `url`; "stub" starts the local deterministic server.
  std::string provider = "http";
  std::string url;
  std::string model = "stub-model";
  std::string run_id = "main";
  std::string partition = "test";
  std::string stub_mode = "hash";
  double temperature = 0.0;
  int max_attempts = 5;
  int base_delay_ms = 500;
  std::size_t parallelism = 4;
  double requests_per_minute = 0.0;
  std::optional<std::size_t> query_budget;
};

struct ServerConfig {
  std::string host = "127.0.0.1";
  int port = 8080;
  fs::path store = "annotations.sqlite";
  std::optional<fs::path> static_dir;
  std::optional<fs::path> instructions;
};

struct ExternalPredictions {
  std::string name;
  fs::path path;
};

struct EvalConfig {
  double min_coverage = 0.95;
  int histogram_bins = 5;
  bool legacy_histogram_scaling = false;
  std::vector<ExternalPredictions> predictions;
};

struct SweepConfig {
  std::string family = "basic";
  // Shot count to run id.
  std::map<int, std::string> runs;
};

struct FoldReportConfig {
  std::optional<fs::path> folds;
  int k = 10;
  std::string ci = "t";
};

struct PipelineConfig {
  // Directory relative paths resolve against.
  fs::path base_dir;
  PathsConfig paths;
  SeedConfig seeds;
  CleaningConfig cleaning;
  SamplingConfig sampling;
  PlanConfig plan;
  SimulationConfig simulate;
  SplitConfig split;
  KfoldConfig kfold;
  ShotsConfig shots;
  LlmConfig llm;
  ServerConfig server;
  EvalConfig eval;
  SweepConfig sweep;
  FoldReportConfig fold_report;
  llmrun::PriceTable prices;

  fs::path Resolve(const fs::path& p) const;
  fs::path Artifact(const std::string& name) const;
  fs::path ManifestDir() const;
  fs::path ExportPath() const;
  fs::path RunsDir() const;
  fs::path StorePath() const;
};

// Throws kConfigError on unknown keys, wrong types or a missing seed.
PipelineConfig ConfigFromJson(const nlohmann::json& j,
                              const fs::path& base_dir);
PipelineConfig LoadConfig(const fs::path& path);
nlohmann::json ConfigToJson(const PipelineConfig& config);

// Checks inputs exist and parameters are coherent. Touches nothing on disk.
void ValidateConfig(const PipelineConfig& config);

// Secrets come from the environment only.
std::string ApiKey();
std::string AnnotatorToken(const std::string& annotator_id);

}  // namespace emoint::pipeline

#endif  // EMOINT_PIPELINE_CONFIG_H_
