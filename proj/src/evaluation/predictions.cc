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

#include "emoint/evaluation/predictions.h"

#include <fmt/core.h>

#include "emoint/common/csv.h"
#include "emoint/common/error.h"

namespace emoint::evaluation {

std::string_view SourceKindName(SourceKind kind) {
  switch (kind) {
    case SourceKind::kLlm: return "llm";
    case SourceKind::kSupervised: return "supervised_external";
    case SourceKind::kHuman: return "human";
  }
  return "";
}

PredictionSet ReadPredictions(const std::filesystem::path& path,
                              std::string name) {
  const csv::Table table = csv::Read(path);
  PredictionSet set;
  set.name = std::move(name);
  set.kind = SourceKind::kSupervised;
  const std::size_t id_col = table.Column("text_id");
  std::array<std::size_t, kMetricCount> cols{};
  for (Metric m : kAllMetrics) cols[Index(m)] = table.Column(MetricKey(m));
  std::size_t line = 1;
  for (const csv::Row& row : table.rows) {
    ++line;
    PredictionRow pred;
    for (std::size_t m = 0; m < kMetricCount; ++m) {
      const std::string& cell = row[cols[m]];
      if (cell.empty()) continue;
      double v = 0.0;
      try {
        std::size_t used = 0;
        v = std::stod(cell, &used);
        if (used != cell.size()) throw std::invalid_argument(cell);
      } catch (const std::logic_error&) {
        throw Error(ErrorCode::kParseError,
                    fmt::format("{}:{}: bad value '{}'", path.string(), line,
                                cell));
      }
      if (!(v >= 0.0 && v <= 1.0)) {
        throw Error(ErrorCode::kParseError,
                    fmt::format("{}:{}: value {} outside [0,1]", path.string(),
                                line, v));
      }
      pred[m] = v;
    }
    if (!set.rows.emplace(row[id_col], pred).second) {
      throw Error(ErrorCode::kParseError,
                  fmt::format("{}: duplicate text id '{}'", path.string(),
                              row[id_col]));
    }
  }
  return set;
}

void WritePredictions(const std::filesystem::path& path,
                      const PredictionSet& set) {
  csv::Table table;
  table.header = {"text_id"};
  for (Metric m : kAllMetrics) table.header.emplace_back(MetricKey(m));
  for (const auto& [id, row] : set.rows) {
    csv::Row out = {id};
    for (const auto& v : row) {
      out.push_back(v ? fmt::format("{:.17g}", *v) : "");
    }
    table.rows.push_back(std::move(out));
  }
  csv::Write(path, table);
}

PredictionSet PredictionsFromOutcomes(
    const std::vector<llmrun::LlmOutcome>& outcomes, std::string name,
    std::string run_id) {
  PredictionSet set;
  set.name = std::move(name);
  set.kind = SourceKind::kLlm;
  set.run_id = std::move(run_id);
  for (const auto& o : outcomes) {
    PredictionRow& row = set.rows[o.text_id];
    if (o.status == llmrun::OutcomeStatus::kOk && o.parsed) {
      row[Index(o.metric)] = CanonicalizeReply(*o.parsed);
    }
  }
  return set;
}

PredictionSet PredictionsFromMeans(
    const std::map<std::string, MetricArray>& means, std::string name) {
  PredictionSet set;
  set.name = std::move(name);
  set.kind = SourceKind::kHuman;
  for (const auto& [id, m] : means) {
    PredictionRow row;
    for (std::size_t i = 0; i < kMetricCount; ++i) row[i] = m[i];
    set.rows.emplace(id, row);
  }
  return set;
}

}  // namespace emoint::evaluation
