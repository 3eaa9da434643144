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

#include "emoint/annostore/rating.h"

#include <fmt/core.h>

#include "emoint/common/csv.h"
#include "emoint/common/error.h"
#include "emoint/common/stats.h"

namespace emoint::annostore {

void ValidateLabels(const RawLabels& labels) {
  for (Metric m : kAllMetrics) {
    const int v = labels[Index(m)];
    if (v < RawMin(m) || v > RawMax(m)) {
      throw Error(ErrorCode::kScaleViolation,
                  fmt::format("{} = {} outside {}..{}", MetricKey(m), v,
                              RawMin(m), RawMax(m)));
    }
  }
}

MetricArray CanonicalLabels(const RawLabels& labels) {
  MetricArray out{};
  for (Metric m : kAllMetrics) {
    out[Index(m)] = Canonicalize(m, labels[Index(m)]);
  }
  return out;
}

RawLabels LabelsFromJson(const nlohmann::json& j) {
  if (!j.is_object()) {
    throw Error(ErrorCode::kParseError, "labels must be an object");
  }
  RawLabels labels{};
  for (Metric m : kAllMetrics) {
    const auto it = j.find(std::string(MetricKey(m)));
    if (it == j.end() || !it->is_number_integer()) {
      throw Error(ErrorCode::kScaleViolation,
                  fmt::format("missing integer label '{}'", MetricKey(m)));
    }
    labels[Index(m)] = it->get<int>();
  }
  return labels;
}

nlohmann::json LabelsToJson(const RawLabels& labels) {
  nlohmann::json j = nlohmann::json::object();
  for (Metric m : kAllMetrics) j[std::string(MetricKey(m))] = labels[Index(m)];
  return j;
}

TextAggregate AggregateRatings(std::string_view text_id,
                               std::span<const RatingRecord> ratings) {
  if (ratings.empty()) {
    throw Error(ErrorCode::kNoRatings,
                fmt::format("no final ratings for text '{}'", text_id));
  }
  TextAggregate agg;
  agg.text_id = std::string(text_id);
  agg.count = ratings.size();
  std::vector<double> column(ratings.size());
  for (Metric m : kAllMetrics) {
    for (std::size_t i = 0; i < ratings.size(); ++i) {
      column[i] = Canonicalize(m, ratings[i].labels[Index(m)]);
    }
    agg.mean[Index(m)] = Mean(column);
    agg.sd[Index(m)] = PopulationSd(column);
  }
  return agg;
}

void WriteExport(const std::filesystem::path& path,
                 const std::vector<RatingRecord>& finals) {
  csv::Table table;
  table.header = {"text_id", "annotator_id"};
  for (Metric m : kAllMetrics) table.header.emplace_back(MetricKey(m));
  table.header.emplace_back("submitted_at");
  for (const RatingRecord& r : finals) {
    csv::Row row = {r.text_id, r.annotator_id};
    for (int v : r.labels) row.push_back(std::to_string(v));
    row.push_back(r.submitted_at);
    table.rows.push_back(std::move(row));
  }
  csv::Write(path, table);
}

std::vector<RatingRecord> ReadExport(const std::filesystem::path& path) {
  const csv::Table table = csv::Read(path);
  const std::size_t text = table.Column("text_id");
  const std::size_t annotator = table.Column("annotator_id");
  const std::size_t when = table.Column("submitted_at");
  std::array<std::size_t, kMetricCount> cols{};
  for (Metric m : kAllMetrics) cols[Index(m)] = table.Column(MetricKey(m));
  std::vector<RatingRecord> out;
  out.reserve(table.rows.size());
  for (const csv::Row& row : table.rows) {
    RatingRecord r;
    r.text_id = row[text];
    r.annotator_id = row[annotator];
    r.submitted_at = row[when];
    r.status = RatingStatus::kFinal;
    for (std::size_t i = 0; i < kMetricCount; ++i) {
      try {
        r.labels[i] = std::stoi(row[cols[i]]);
      } catch (const std::logic_error&) {
        throw Error(ErrorCode::kParseError,
                    fmt::format("{}: bad label '{}'", path.string(),
                                row[cols[i]]));
      }
    }
    ValidateLabels(r.labels);
    out.push_back(std::move(r));
  }
  return out;
}

std::map<std::string, std::vector<MetricArray>> CanonicalByText(
    const std::vector<RatingRecord>& finals) {
  std::map<std::string, std::vector<MetricArray>> out;
  for (const RatingRecord& r : finals) {
    out[r.text_id].push_back(CanonicalLabels(r.labels));
  }
  return out;
}

std::map<std::string, TextAggregate> AggregateAll(
    const std::vector<RatingRecord>& finals) {
  std::map<std::string, std::vector<RatingRecord>> grouped;
  for (const RatingRecord& r : finals) grouped[r.text_id].push_back(r);
  std::map<std::string, TextAggregate> out;
  for (const auto& [id, rs] : grouped) out.emplace(id, AggregateRatings(id, rs));
  return out;
}

}  // namespace emoint::annostore
