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

#ifndef EMOINT_ANNOSTORE_RATING_H_
#define EMOINT_ANNOSTORE_RATING_H_

#include <array>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "emoint/common/metrics.h"
#include "json.hpp"

namespace emoint::annostore {

// Raw integer labels as entered: 0..4 for the six emotions, 1..5 for
// valence and arousal.
using RawLabels = std::array<int, kMetricCount>;

// Throws kScaleViolation naming the first out-of-range metric.
void ValidateLabels(const RawLabels& labels);
MetricArray CanonicalLabels(const RawLabels& labels);

// {"happiness": 0..4, ..., "valence": 1..5, "arousal": 1..5}; every metric
// must be present.
RawLabels LabelsFromJson(const nlohmann::json& j);
nlohmann::json LabelsToJson(const RawLabels& labels);

enum class RatingStatus { kDraft, kFinal };

struct RatingRecord {
  std::string annotator_id;
  std::string text_id;
  std::string set_id;
  RawLabels labels{};
  // ISO-8601 UTC; filled by the store when empty.
  std::string submitted_at;
  RatingStatus status = RatingStatus::kDraft;
};

struct TextAggregate {
  std::string text_id;
  MetricArray mean{};
  // Population SD of the canonical labels.
  MetricArray sd{};
  std::size_t count = 0;
};

// Averages the given ratings of one text. Throws kNoRatings when empty.
TextAggregate AggregateRatings(std::string_view text_id,
                               std::span<const RatingRecord> ratings);

// Export rows: text_id,annotator_id,happiness,...,arousal,submitted_at.
void WriteExport(const std::filesystem::path& path,
                 const std::vector<RatingRecord>& finals);
std::vector<RatingRecord> ReadExport(const std::filesystem::path& path);

// Canonical label vectors grouped by text id, in export order.
std::map<std::string, std::vector<MetricArray>> CanonicalByText(
    const std::vector<RatingRecord>& finals);

std::map<std::string, TextAggregate> AggregateAll(
    const std::vector<RatingRecord>& finals);

}  // namespace emoint::annostore

#endif  // EMOINT_ANNOSTORE_RATING_H_
