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

#ifndef EMOINT_EVALUATION_PREDICTIONS_H_
#define EMOINT_EVALUATION_PREDICTIONS_H_

#include <array>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "emoint/common/metrics.h"
#include "emoint/llmrun/run.h"

namespace emoint::evaluation {

enum class SourceKind { kLlm, kSupervised, kHuman };
std::string_view SourceKindName(SourceKind kind);

// Missing cells stand for rejected or absent predictions.
using PredictionRow = std::array<std::optional<double>, kMetricCount>;

struct PredictionSet {
  std::string name;
  SourceKind kind = SourceKind::kSupervised;
  std::string run_id;
  // Canonical [0,1] values by text id.
  std::map<std::string, PredictionRow> rows;
};

// Delimited text_id,happiness,...,arousal with values in [0,1]; an empty
// cell is a missing prediction. Throws kParseError.
PredictionSet ReadPredictions(const std::filesystem::path& path,
                              std::string name);
void WritePredictions(const std::filesystem::path& path,
                      const PredictionSet& set);

// Ok outcomes mapped from the 1..5 reply scale to [0,1].
PredictionSet PredictionsFromOutcomes(
    const std::vector<llmrun::LlmOutcome>& outcomes, std::string name,
    std::string run_id);

// Reference means as a prediction set.
PredictionSet PredictionsFromMeans(const std::map<std::string, MetricArray>& means,
                                   std::string name);

}  // namespace emoint::evaluation

#endif  // EMOINT_EVALUATION_PREDICTIONS_H_
