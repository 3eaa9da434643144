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

#ifndef EMOINT_PIPELINE_STAGES_H_
#define EMOINT_PIPELINE_STAGES_H_

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "emoint/pipeline/config.h"

namespace emoint::pipeline {

// Per-invocation overrides layered on top of the config file.
struct StageOptions {
  std::optional<std::uint64_t> seed;
  // annotate-llm
  std::optional<std::string> run_id;
  std::optional<std::string> model;
  std::optional<int> shots_basic;
  std::optional<int> shots_dimensional;
  std::optional<bool> resume;
  // eval, histogram
  std::optional<fs::path> reference;
  std::vector<ExternalPredictions> predictions;
  std::vector<std::string> runs;
  // sweep-report
  std::optional<std::string> family;
  std::map<int, std::string> sweep_runs;
  // fold-report
  std::optional<fs::path> folds;
  // serve: polled while serving; nullptr returns right after the import.
  std::function<bool()> keep_serving;
  std::optional<int> port;
  // Called with the bound port once the server listens.
  std::function<void(int)> on_listening;
};

// Stages in dependency order.
const std::vector<std::string>& StageNames();
bool IsStage(const std::string& name);

// The offline chain run by the "all" pseudo-stage.
const std::vector<std::string>& OfflineChain();

// Runs one stage and returns its manifest, also written under
// <artifacts>/manifests. Throws kConfigError on a bad config and
// kMissingUpstream when an input artifact is absent.
nlohmann::json RunStage(const std::string& stage, const PipelineConfig& config,
                        const StageOptions& options = {});

// Runs every stage of OfflineChain() and returns their manifests.
nlohmann::json RunAll(const PipelineConfig& config,
                      const StageOptions& options = {});

// Manifest file for a stage; annotate-llm manifests are keyed by run id.
fs::path ManifestPath(const PipelineConfig& config, const std::string& stage,
                      const std::string& run_id = "");

// Loads every manifest under the artifacts directory.
std::vector<nlohmann::json> LoadManifests(const PipelineConfig& config);

}  // namespace emoint::pipeline

#endif  // EMOINT_PIPELINE_STAGES_H_
