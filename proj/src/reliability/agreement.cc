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

#include "emoint/reliability/agreement.h"

#include <cmath>

#include <fmt/core.h>

#include "emoint/common/csv.h"
#include "emoint/common/error.h"

namespace emoint::reliability {

AgreementReport ComputeAgreement(const RatingsByText& ratings,
                                 std::size_t raters, double alpha) {
  if (raters == 0) {
    std::map<std::size_t, std::size_t> histogram;
    for (const auto& [id, rs] : ratings) ++histogram[rs.size()];
    std::size_t best = 0;
    for (const auto& [count, freq] : histogram) {
      if (count >= 2 && freq >= best) {
        best = freq;
        raters = count;
      }
    }
  }
  if (raters < 2) {
    throw Error(ErrorCode::kNoRatings, "no text has two or more ratings");
  }

  AgreementReport report;
  report.raters = raters;
  std::vector<const std::vector<MetricArray>*> used;
  for (const auto& [id, rs] : ratings) {
    if (rs.size() == raters) {
      used.push_back(&rs);
    } else {
      ++report.texts_excluded;
    }
  }
  report.texts_used = used.size();
  if (used.size() < 2) {
    throw Error(ErrorCode::kNoRatings,
                fmt::format("only {} texts carry exactly {} ratings",
                            used.size(), raters));
  }

  for (Metric m : kAllMetrics) {
    std::vector<double> values;
    values.reserve(used.size() * raters);
    for (const auto* rs : used) {
      for (const MetricArray& r : *rs) values.push_back(r[Index(m)]);
    }
    MetricAgreement row;
    row.metric = m;
    try {
      const RatingMatrix matrix(used.size(), raters, std::move(values));
      row.icc1 = Icc1(matrix, alpha);
      row.icc1k = Icc1k(matrix, alpha);
    } catch (const Error& e) {
      row.error = e.what();
    }
    report.metrics.push_back(std::move(row));
  }
  return report;
}

std::string RenderAgreementTable(const AgreementReport& report) {
  std::string out = "Emotion Type ICC 95% CI\n";
  for (const auto& row : report.metrics) {
    const std::string_view label = MetricLabel(row.metric);
    if (!row.error.empty()) {
      out += fmt::format("{} undefined ({})\n", label, row.error);
      continue;
    }
    out += FormatIccRow(label, *row.icc1) + "\n";
    out += FormatIccRow(label, *row.icc1k) + "\n";
  }
  return out;
}

namespace {

std::string Num(double v) {
  return std::isfinite(v) ? fmt::format("{:.6f}", v) : "inf";
}

nlohmann::json IccJson(const IccResult& r) {
  return {
      {"type", IccKindName(r.kind)},
      {"icc", r.estimate},
      {"ci95", {r.ci_low, r.ci_high}},
      {"f", std::isfinite(r.f_value) ? nlohmann::json(r.f_value)
                                     : nlohmann::json(nullptr)},
      {"df1", r.df1},
      {"df2", r.df2},
      {"band", BandName(r.band)},
  };
}

}  // namespace

std::string RenderAgreementCsv(const AgreementReport& report) {
  csv::Table table;
  table.header = {"Emotion", "Type",  "ICC", "CI low", "CI high",
                  "F",       "df1",   "df2", "band"};
  for (const auto& row : report.metrics) {
    if (!row.error.empty()) continue;
    for (const IccResult* r : {&*row.icc1, &*row.icc1k}) {
      table.rows.push_back({std::string(MetricLabel(row.metric)),
                            std::string(IccKindName(r->kind)),
                            Num(r->estimate), Num(r->ci_low), Num(r->ci_high),
                            Num(r->f_value), std::to_string(r->df1),
                            std::to_string(r->df2),
                            std::string(BandName(r->band))});
    }
  }
  return csv::WriteString(table);
}

nlohmann::json AgreementToJson(const AgreementReport& report) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& row : report.metrics) {
    nlohmann::json j = {{"emotion", MetricLabel(row.metric)},
                        {"metric", MetricKey(row.metric)}};
    if (row.error.empty()) {
      j["rows"] = {IccJson(*row.icc1), IccJson(*row.icc1k)};
    } else {
      j["error"] = row.error;
    }
    rows.push_back(std::move(j));
  }
  return {{"raters", report.raters},
          {"texts_used", report.texts_used},
          {"texts_excluded", report.texts_excluded},
          {"metrics", rows}};
}

}  // namespace emoint::reliability
