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

#ifndef EMOINT_EVALUATION_REPORT_H_
#define EMOINT_EVALUATION_REPORT_H_

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "emoint/common/metrics.h"
#include "emoint/evaluation/correlation.h"
#include "emoint/evaluation/predictions.h"
#include "json.hpp"

namespace emoint::evaluation {

struct MetricEval {
  Metric metric = Metric::kHappiness;
  // Absent when fewer than three usable pairs or a constant side.
  std::optional<double> pearson_r;
  double prediction_sd = 0.0;
  double reference_sd_after = 0.0;
  double reference_sd_before = 0.0;
  std::size_t n_pairs = 0;
  // Evaluated texts without a usable prediction.
  std::size_t n_rejected = 0;
};

struct EvalReport {
  std::string source;
  std::vector<MetricEval> metrics;
};

// Pairwise deletion per metric over the reference texts. `profile`
// supplies the reference SD columns; when absent they come from the means.
EvalReport Evaluate(const std::map<std::string, MetricArray>& reference,
                    const PredictionSet& predictions,
                    std::optional<SdProfile> profile = std::nullopt);

// "Emotion Correlation Model's SD Annotator's SD" rows.
std::string RenderMainTable(const EvalReport& report);
nlohmann::json EvalReportToJson(const EvalReport& report);

// --- shot sweep ---

struct SweepRow {
  int k = 0;
  double mean_r = 0.0;
  double mean_sd = 0.0;
  std::size_t rejected = 0;
  bool selected = false;
};

struct SweepReport {
  MetricFamily family = MetricFamily::kBasic;
  std::vector<SweepRow> rows;
  int selected_k = 0;
};

std::string ShotName(int k);

// `by_k` maps shot count to that sweep's validation outcomes. Every k in
// `expected_k` must be present (kMissingK). Means run over the family's
// metrics; the highest mean r is selected, ties to the smaller k.
SweepReport ShotSweepReport(
    const std::map<int, std::vector<llmrun::LlmOutcome>>& by_k,
    const std::map<std::string, MetricArray>& reference, MetricFamily family,
    const std::vector<int>& expected_k);

// "Type r SD n Rejected" with Zero Shot .. Five Shot rows.
std::string RenderSweepTable(const SweepReport& report);
nlohmann::json SweepReportToJson(const SweepReport& report);

// --- fold aggregation ---

enum class FoldCiMethod { kTRaw, kFisherZ };

struct FoldSummary {
  Metric metric = Metric::kHappiness;
  double mean = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  std::vector<double> folds;
};

// Exactly `k` values per metric (kWrongFoldCount). The t method uses the
// sample SD of raw r; Fisher-z averages atanh(r) and maps back.
std::vector<FoldSummary> FoldAggregate(
    const std::map<Metric, std::vector<double>>& fold_r, int k = 10,
    FoldCiMethod method = FoldCiMethod::kTRaw);

// "0.83 [0.82, 0.84]".
std::string FormatFoldCell(const FoldSummary& s);
// Metric columns with Mean and CI rows.
std::string RenderFoldTable(const std::vector<FoldSummary>& summaries);
nlohmann::json FoldSummaryToJson(const std::vector<FoldSummary>& summaries);

// --- histograms ---

struct Histogram {
  std::string source;
  Metric metric = Metric::kHappiness;
  std::vector<double> edges;
  std::vector<std::size_t> counts;
};

// Equal-width bins on [0,1]; 1.0 falls in the last bin. Throws kNoData.
Histogram LabelHistogram(std::string source, Metric metric,
                         const std::vector<double>& values, int bins = 5);
// Raw integer labels; `legacy_divide_by_5` bins raw / 5 instead of the
// canonical mapping.
Histogram RawLabelHistogram(std::string source, Metric metric,
                            const std::vector<int>& raw, int bins = 5,
                            bool legacy_divide_by_5 = false);
nlohmann::json HistogramToJson(const Histogram& h);
Histogram HistogramFromJson(const nlohmann::json& j);

// --- comparison ---

struct ComparisonRow {
  std::string source;
  MetricArray r{};
  MetricArray sd{};
  std::array<std::size_t, kMetricCount> n{};
};

struct ComparisonTable {
  // Sorted by source name.
  std::vector<ComparisonRow> rows;
  SdProfile reference;
};

// Throws kCoverageMismatch when a source covers less than `min_coverage` of
// the reference texts.
ComparisonTable BuildComparison(
    std::vector<PredictionSet> sources,
    const std::map<std::string, MetricArray>& reference,
    const SdProfile& profile, double min_coverage = 0.95);

std::string RenderComparisonTable(const ComparisonTable& table);
std::string ComparisonToCsv(const ComparisonTable& table);
nlohmann::json ComparisonToJson(const ComparisonTable& table);

}  // namespace emoint::evaluation

#endif  // EMOINT_EVALUATION_REPORT_H_
