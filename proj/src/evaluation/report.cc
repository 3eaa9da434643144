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

#include "emoint/evaluation/report.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/core.h>

#include "emoint/common/csv.h"
#include "emoint/common/error.h"
#include "emoint/common/stats.h"
#include "emoint/reliability/fdist.h"

namespace emoint::evaluation {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string Fixed2(double v) {
  return std::isnan(v) ? "n/a" : fmt::format("{:.2f}", v);
}

nlohmann::json NumberOrNull(double v) {
  return std::isnan(v) ? nlohmann::json(nullptr) : nlohmann::json(v);
}

std::vector<Metric> FamilyMetrics(MetricFamily family) {
  std::vector<Metric> out;
  for (Metric m : kAllMetrics) {
    if (FamilyOf(m) == family) out.push_back(m);
  }
  return out;
}

// Left-aligned columns separated by two spaces.
std::string Align(const std::vector<std::vector<std::string>>& rows) {
  std::vector<std::size_t> width;
  auto display = [](const std::string& s) {
    std::size_t n = 0;
    for (unsigned char c : s) n += (c & 0xC0) != 0x80;
    return n;
  };
  for (const auto& row : rows) {
    if (width.size() < row.size()) width.resize(row.size(), 0);
    for (std::size_t i = 0; i < row.size(); ++i) {
      width[i] = std::max(width[i], display(row[i]));
    }
  }
  std::string out;
  for (const auto& row : rows) {
    std::string line;
    for (std::size_t i = 0; i < row.size(); ++i) {
      line += row[i];
      if (i + 1 < row.size()) {
        line.append(width[i] - display(row[i]) + 2, ' ');
      }
    }
    while (!line.empty() && line.back() == ' ') line.pop_back();
    out += line;
    out += '\n';
  }
  return out;
}

MetricEval EvaluateMetric(const std::map<std::string, MetricArray>& reference,
                          const PredictionSet& predictions, Metric metric) {
  MetricEval e;
  e.metric = metric;
  const std::size_t m = Index(metric);
  std::vector<double> ref, pred, all_ref;
  for (const auto& [id, values] : reference) {
    all_ref.push_back(values[m]);
    const auto it = predictions.rows.find(id);
    if (it == predictions.rows.end() || !it->second[m]) {
      ++e.n_rejected;
      continue;
    }
    ref.push_back(values[m]);
    pred.push_back(*it->second[m]);
  }
  e.n_pairs = ref.size();
  e.prediction_sd = pred.empty() ? kNaN : PopulationSd(pred);
  e.reference_sd_after = all_ref.empty() ? kNaN : PopulationSd(all_ref);
  e.reference_sd_before = e.reference_sd_after;
  try {
    e.pearson_r = Pearson(pred, ref);
  } catch (const Error& err) {
    if (err.code() != ErrorCode::kDegenerateInput) throw;
  }
  return e;
}

}  // namespace

EvalReport Evaluate(const std::map<std::string, MetricArray>& reference,
                    const PredictionSet& predictions,
                    std::optional<SdProfile> profile) {
  EvalReport report;
  report.source = predictions.name;
  for (Metric m : kAllMetrics) {
    MetricEval e = EvaluateMetric(reference, predictions, m);
    if (profile) {
      e.reference_sd_after = profile->sd_after[Index(m)];
      e.reference_sd_before = profile->sd_before[Index(m)];
    }
    report.metrics.push_back(e);
  }
  return report;
}

std::string RenderMainTable(const EvalReport& report) {
  std::vector<std::vector<std::string>> rows = {
      {"Emotion", "Correlation", "Model's SD", "Annotator's SD"}};
  for (const MetricEval& e : report.metrics) {
    rows.push_back({std::string(MetricLabel(e.metric)),
                    e.pearson_r ? Fixed2(*e.pearson_r) : "n/a",
                    Fixed2(e.prediction_sd), Fixed2(e.reference_sd_after)});
  }
  return Align(rows);
}

nlohmann::json EvalReportToJson(const EvalReport& report) {
  nlohmann::json metrics = nlohmann::json::object();
  for (const MetricEval& e : report.metrics) {
    metrics[std::string(MetricKey(e.metric))] = {
        {"pearson_r", e.pearson_r ? nlohmann::json(*e.pearson_r)
                                  : nlohmann::json(nullptr)},
        {"prediction_sd", NumberOrNull(e.prediction_sd)},
        {"reference_sd_after_avg", NumberOrNull(e.reference_sd_after)},
        {"reference_sd_before_avg", NumberOrNull(e.reference_sd_before)},
        {"n_pairs", e.n_pairs},
        {"n_rejected", e.n_rejected},
    };
  }
  return {{"source", report.source}, {"metrics", metrics}};
}

std::string ShotName(int k) {
  static constexpr const char* kNames[] = {"Zero", "One",  "Two",
                                           "Three", "Four", "Five"};
  if (k < 0 || k > 5) return fmt::format("{} Shot", k);
  return fmt::format("{} Shot", kNames[k]);
}

SweepReport ShotSweepReport(
    const std::map<int, std::vector<llmrun::LlmOutcome>>& by_k,
    const std::map<std::string, MetricArray>& reference, MetricFamily family,
    const std::vector<int>& expected_k) {
  for (int k : expected_k) {
    if (!by_k.count(k)) {
      throw Error(ErrorCode::kMissingK,
                  fmt::format("no outcomes for {}", ShotName(k)));
    }
  }
  if (by_k.empty()) throw Error(ErrorCode::kMissingK, "empty sweep");
  SweepReport report;
  report.family = family;
  const auto metrics = FamilyMetrics(family);
  double best = -std::numeric_limits<double>::infinity();
  for (const auto& [k, outcomes] : by_k) {
    const PredictionSet preds = PredictionsFromOutcomes(outcomes, "sweep", "");
    SweepRow row;
    row.k = k;
    double r_sum = 0.0, sd_sum = 0.0;
    int r_n = 0, sd_n = 0;
    for (Metric m : metrics) {
      const MetricEval e = EvaluateMetric(reference, preds, m);
      if (e.pearson_r) {
        r_sum += *e.pearson_r;
        ++r_n;
      }
      if (!std::isnan(e.prediction_sd)) {
        sd_sum += e.prediction_sd;
        ++sd_n;
      }
    }
    for (const auto& o : outcomes) {
      if (FamilyOf(o.metric) == family &&
          o.status != llmrun::OutcomeStatus::kOk) {
        ++row.rejected;
      }
    }
    row.mean_r = r_n > 0 ? r_sum / r_n : kNaN;
    row.mean_sd = sd_n > 0 ? sd_sum / sd_n : kNaN;
    if (!std::isnan(row.mean_r) && row.mean_r > best) {
      best = row.mean_r;
      report.selected_k = k;
    }
    report.rows.push_back(row);
  }
  if (std::isinf(best)) {
    throw Error(ErrorCode::kDegenerateInput,
                "no shot setting produced a defined correlation");
  }
  for (SweepRow& row : report.rows) row.selected = row.k == report.selected_k;
  return report;
}

std::string RenderSweepTable(const SweepReport& report) {
  std::vector<std::vector<std::string>> rows = {
      {"Type", "r", "SD", "n Rejected"}};
  for (const SweepRow& row : report.rows) {
    rows.push_back({ShotName(row.k), Fixed2(row.mean_r), Fixed2(row.mean_sd),
                    std::to_string(row.rejected)});
  }
  return Align(rows) + fmt::format("Selected: {}\n", ShotName(report.selected_k));
}

nlohmann::json SweepReportToJson(const SweepReport& report) {
  nlohmann::json rows = nlohmann::json::array();
  for (const SweepRow& row : report.rows) {
    rows.push_back({{"k", row.k},
                    {"type", ShotName(row.k)},
                    {"mean_r", NumberOrNull(row.mean_r)},
                    {"mean_sd", NumberOrNull(row.mean_sd)},
                    {"rejected", row.rejected},
                    {"selected", row.selected}});
  }
  return {{"family", FamilyKey(report.family)},
          {"selected_k", report.selected_k},
          {"rows", rows}};
}

std::vector<FoldSummary> FoldAggregate(
    const std::map<Metric, std::vector<double>>& fold_r, int k,
    FoldCiMethod method) {
  if (k < 2) {
    throw Error(ErrorCode::kWrongFoldCount, "need at least two folds");
  }
  std::vector<FoldSummary> out;
  const double t = reliability::TQuantile(0.975, k - 1);
  for (const auto& [metric, values] : fold_r) {
    if (values.size() != static_cast<std::size_t>(k)) {
      throw Error(ErrorCode::kWrongFoldCount,
                  fmt::format("{}: {} fold values, expected {}",
                              MetricKey(metric), values.size(), k));
    }
    FoldSummary s;
    s.metric = metric;
    s.folds = values;
    const double root_k = std::sqrt(static_cast<double>(k));
    if (method == FoldCiMethod::kTRaw) {
      s.mean = Mean(values);
      const double half = t * SampleSd(values) / root_k;
      s.ci_low = s.mean - half;
      s.ci_high = s.mean + half;
    } else {
      std::vector<double> z;
      for (double r : values) {
        z.push_back(std::atanh(std::clamp(r, -1.0 + 1e-15, 1.0 - 1e-15)));
      }
      const double mz = Mean(z);
      const double half = t * SampleSd(z) / root_k;
      s.mean = std::tanh(mz);
      s.ci_low = std::tanh(mz - half);
      s.ci_high = std::tanh(mz + half);
    }
    out.push_back(std::move(s));
  }
  return out;
}

std::string FormatFoldCell(const FoldSummary& s) {
  return fmt::format("{:.2f} [{:.2f}, {:.2f}]", s.mean, s.ci_low, s.ci_high);
}

std::string RenderFoldTable(const std::vector<FoldSummary>& summaries) {
  std::vector<std::string> header = {"Emotion"}, mean = {"Mean"},
                           ci = {"CI 95%"};
  for (const FoldSummary& s : summaries) {
    header.emplace_back(MetricLabel(s.metric));
    mean.push_back(Fixed2(s.mean));
    ci.push_back(fmt::format("[{:.2f}, {:.2f}]", s.ci_low, s.ci_high));
  }
  return Align({header, mean, ci});
}

nlohmann::json FoldSummaryToJson(const std::vector<FoldSummary>& summaries) {
  nlohmann::json j = nlohmann::json::object();
  for (const FoldSummary& s : summaries) {
    j[std::string(MetricKey(s.metric))] = {{"mean", s.mean},
                                           {"ci_low", s.ci_low},
                                           {"ci_high", s.ci_high},
                                           {"folds", s.folds},
                                           {"cell", FormatFoldCell(s)}};
  }
  return j;
}

Histogram LabelHistogram(std::string source, Metric metric,
                         const std::vector<double>& values, int bins) {
  if (values.empty()) {
    throw Error(ErrorCode::kNoData,
                fmt::format("no labels for {} histogram", MetricKey(metric)));
  }
  if (bins < 1) throw Error(ErrorCode::kInvalidArgument, "bins must be >= 1");
  Histogram h;
  h.source = std::move(source);
  h.metric = metric;
  for (int i = 0; i <= bins; ++i) h.edges.push_back(double(i) / bins);
  h.counts.assign(static_cast<std::size_t>(bins), 0);
  for (double v : values) {
    if (!(v >= 0.0 && v <= 1.0)) {
      throw Error(ErrorCode::kInvalidArgument,
                  fmt::format("histogram value {} outside [0,1]", v));
    }
    // Slack keeps values that sit on an edge, such as 0.6, in the upper bin.
    const int b = std::min(bins - 1, static_cast<int>(std::floor(v * bins + 1e-9)));
    ++h.counts[static_cast<std::size_t>(b)];
  }
  return h;
}

Histogram RawLabelHistogram(std::string source, Metric metric,
                            const std::vector<int>& raw, int bins,
                            bool legacy_divide_by_5) {
  std::vector<double> values;
  values.reserve(raw.size());
  for (int v : raw) {
    values.push_back(legacy_divide_by_5 ? v / 5.0 : Canonicalize(metric, v));
  }
  return LabelHistogram(std::move(source), metric, values, bins);
}

nlohmann::json HistogramToJson(const Histogram& h) {
  return {{"source", h.source},
          {"metric", MetricKey(h.metric)},
          {"edges", h.edges},
          {"counts", h.counts}};
}

Histogram HistogramFromJson(const nlohmann::json& j) {
  try {
    Histogram h;
    h.source = j.at("source").get<std::string>();
    h.metric = MetricFromKey(j.at("metric").get<std::string>());
    h.edges = j.at("edges").get<std::vector<double>>();
    h.counts = j.at("counts").get<std::vector<std::size_t>>();
    if (h.edges.size() != h.counts.size() + 1) {
      throw Error(ErrorCode::kParseError, "histogram edges/counts mismatch");
    }
    return h;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParseError,
                fmt::format("bad histogram: {}", e.what()));
  }
}

ComparisonTable BuildComparison(
    std::vector<PredictionSet> sources,
    const std::map<std::string, MetricArray>& reference,
    const SdProfile& profile, double min_coverage) {
  if (sources.empty()) {
    throw Error(ErrorCode::kNoData, "comparison needs a prediction set");
  }
  if (reference.empty()) throw Error(ErrorCode::kNoData, "empty reference");
  std::sort(sources.begin(), sources.end(),
            [](const PredictionSet& a, const PredictionSet& b) {
              return a.name < b.name;
            });
  ComparisonTable table;
  table.reference = profile;
  for (const PredictionSet& s : sources) {
    std::size_t covered = 0;
    for (const auto& [id, v] : reference) covered += s.rows.count(id);
    const double coverage =
        static_cast<double>(covered) / static_cast<double>(reference.size());
    if (coverage < min_coverage) {
      throw Error(ErrorCode::kCoverageMismatch,
                  fmt::format("'{}' covers {:.1f}% of {} texts (< {:.1f}%)",
                              s.name, 100 * coverage, reference.size(),
                              100 * min_coverage));
    }
    ComparisonRow row;
    row.source = s.name;
    for (Metric m : kAllMetrics) {
      const MetricEval e = EvaluateMetric(reference, s, m);
      row.r[Index(m)] = e.pearson_r ? *e.pearson_r : kNaN;
      row.sd[Index(m)] = e.prediction_sd;
      row.n[Index(m)] = e.n_pairs;
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

std::string RenderComparisonTable(const ComparisonTable& table) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> header = {"Type"};
  for (Metric m : kAllMetrics) header.emplace_back(MetricLabel(m));
  rows.push_back(header);
  for (const ComparisonRow& row : table.rows) {
    std::vector<std::string> r = {row.source}, sd = {""};
    for (std::size_t m = 0; m < kMetricCount; ++m) {
      r.push_back(Fixed2(row.r[m]));
      sd.push_back("(" + Fixed2(row.sd[m]) + ")");
    }
    rows.push_back(r);
    rows.push_back(sd);
  }
  std::vector<std::string> after = {"Annotator's SD after averaging"},
                           before = {"Annotator's SD before averaging"};
  for (std::size_t m = 0; m < kMetricCount; ++m) {
    after.push_back(Fixed2(table.reference.sd_after[m]));
    before.push_back(Fixed2(table.reference.sd_before[m]));
  }
  rows.push_back(after);
  rows.push_back(before);
  return Align(rows);
}

std::string ComparisonToCsv(const ComparisonTable& table) {
  csv::Table out;
  out.header = {"source", "statistic"};
  for (Metric m : kAllMetrics) out.header.emplace_back(MetricKey(m));
  auto add = [&](const std::string& source, const std::string& stat,
                 const MetricArray& values) {
    csv::Row row = {source, stat};
    for (double v : values) {
      row.push_back(std::isnan(v) ? "" : fmt::format("{:.6f}", v));
    }
    out.rows.push_back(std::move(row));
  };
  for (const ComparisonRow& row : table.rows) {
    add(row.source, "r", row.r);
    add(row.source, "sd", row.sd);
  }
  add("annotators", "sd_after_averaging", table.reference.sd_after);
  add("annotators", "sd_before_averaging", table.reference.sd_before);
  return csv::WriteString(out);
}

nlohmann::json ComparisonToJson(const ComparisonTable& table) {
  auto metric_map = [](const MetricArray& values) {
    nlohmann::json j = nlohmann::json::object();
    for (Metric m : kAllMetrics) {
      j[std::string(MetricKey(m))] = NumberOrNull(values[Index(m)]);
    }
    return j;
  };
  nlohmann::json sources = nlohmann::json::array();
  for (const ComparisonRow& row : table.rows) {
    nlohmann::json n = nlohmann::json::object();
    for (Metric m : kAllMetrics) n[std::string(MetricKey(m))] = row.n[Index(m)];
    sources.push_back({{"source", row.source},
                       {"r", metric_map(row.r)},
                       {"sd", metric_map(row.sd)},
                       {"n_pairs", n}});
  }
  return {{"sources", sources},
          {"annotator_sd_after_averaging", metric_map(table.reference.sd_after)},
          {"annotator_sd_before_averaging",
           metric_map(table.reference.sd_before)}};
}

}  // namespace emoint::evaluation
