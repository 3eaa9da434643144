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

#ifndef EMOINT_LLMRUN_RUN_H_
#define EMOINT_LLMRUN_RUN_H_

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "emoint/common/metrics.h"
#include "emoint/llmrun/client.h"
#include "emoint/llmrun/parse.h"
#include "json.hpp"

namespace emoint::llmrun {

enum class OutcomeStatus { kOk, kRejected, kTransportError };

std::string_view OutcomeStatusName(OutcomeStatus status);
OutcomeStatus ParseOutcomeStatus(std::string_view name);

struct LlmOutcome {
  std::string text_id;
  Metric metric = Metric::kHappiness;
  std::string model;
  std::string raw_reply;
  std::optional<int> parsed;
  OutcomeStatus status = OutcomeStatus::kOk;
  RejectReason reason = RejectReason::kNone;
  std::int64_t tokens_in = 0;
  std::int64_t tokens_out = 0;
  double cost_estimate = 0.0;
  int attempts = 0;
  std::string error;
};

nlohmann::json OutcomeToJson(const LlmOutcome& o);
LlmOutcome OutcomeFromJson(const nlohmann::json& j);

struct LlmTask {
  Metric metric = Metric::kHappiness;
  std::string text_id;
  std::string prompt;
};

struct Price {
  double input_per_million = 0.0;
  double output_per_million = 0.0;
};
using PriceTable = std::map<std::string, Price>;

// {"model": {"input_per_million": x, "output_per_million": y}, ...}
PriceTable PriceTableFromJson(const nlohmann::json& j);

struct CostReport {
  double total = 0.0;
  std::map<std::string, double> per_model;
};

// Throws kUnknownModel for an outcome whose model is not priced.
CostReport EstimateCost(const std::vector<LlmOutcome>& outcomes,
                        const PriceTable& prices);

struct RunOptions {
  std::string run_id;
  std::filesystem::path runs_dir = "runs";
  std::string model;
  double temperature = 0.0;
  RetryPolicy retry;
  std::size_t parallelism = 4;
  double requests_per_minute = 0.0;
  // Recorded in the manifest; prompts already carry the exemplars.
  int shots_basic = 3;
  int shots_dimensional = 2;
  bool resume = true;
  // Stop after this many new queries; unset runs everything.
  std::optional<std::size_t> query_budget;
  std::optional<PriceTable> prices;
  Sleeper sleep = RealSleep;
};

struct RunResult {
  // One per (metric, text_id), sorted by metric then text id.
  std::vector<LlmOutcome> outcomes;
  nlohmann::json manifest;
  std::size_t queried = 0;
  std::size_t reused = 0;
  bool complete = false;
};

std::filesystem::path RunDir(const RunOptions& options);

// Reads runs/<id>/outcomes.jsonl keeping the last record per pair.
std::vector<LlmOutcome> LoadOutcomes(const std::filesystem::path& path);

// Queries every pair not already settled in the run directory, appending
// each outcome as it completes. Transport-error records are retried on
// resume. Throws kConfigError for a missing run id or model, or duplicate
// pairs; transport failures never abort the run.
RunResult RunAnnotation(const std::vector<LlmTask>& tasks, ChatClient& client,
                        const RunOptions& options);

// Delimited run_id,metric,text_id,status,parsed,tokens_in,tokens_out.
void WriteOutcomesCsv(const std::filesystem::path& path,
                      const std::string& run_id,
                      const std::vector<LlmOutcome>& outcomes);

}  // namespace emoint::llmrun

#endif  // EMOINT_LLMRUN_RUN_H_
