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

#ifndef EMOINT_COMMON_METRICS_H_
#define EMOINT_COMMON_METRICS_H_

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>

namespace emoint {

// The eight annotated metrics, in canonical column order.
enum class Metric {
  kHappiness,
  kSadness,
  kAnger,
  kDisgust,
  kFear,
  kPride,
  kValence,
  kArousal,
};

inline constexpr std::size_t kMetricCount = 8;
inline constexpr std::size_t kBasicMetricCount = 6;

inline constexpr std::array<Metric, kMetricCount> kAllMetrics = {
    Metric::kHappiness, Metric::kSadness, Metric::kAnger, Metric::kDisgust,
    Metric::kFear,      Metric::kPride,   Metric::kValence, Metric::kArousal};

enum class MetricFamily { kBasic, kDimensional };

constexpr std::size_t Index(Metric m) { return static_cast<std::size_t>(m); }

constexpr MetricFamily FamilyOf(Metric m) {
  return (m == Metric::kValence || m == Metric::kArousal)
             ? MetricFamily::kDimensional
             : MetricFamily::kBasic;
}

// Lowercase identifier used in files and JSON ("happiness").
std::string_view MetricKey(Metric m);
// Capitalised label used in rendered tables ("Happiness").
std::string_view MetricLabel(Metric m);
std::optional<Metric> ParseMetric(std::string_view key);
// Throws kInvalidArgument.
Metric MetricFromKey(std::string_view key);

std::string_view FamilyKey(MetricFamily f);

// Raw scale bounds for human labels: 0..4 for emotions, 1..5 for the
// pictographic valence and arousal scales.
constexpr int RawMin(Metric m) {
  return FamilyOf(m) == MetricFamily::kBasic ? 0 : 1;
}
constexpr int RawMax(Metric m) { return RawMin(m) + 4; }

// Maps a raw human label to the canonical [0, 1] frame.
constexpr double Canonicalize(Metric m, double raw) {
  return (raw - RawMin(m)) / 4.0;
}

// LLM replies use 1..5 for every metric.
constexpr double CanonicalizeReply(int score) { return (score - 1) / 4.0; }

using MetricArray = std::array<double, kMetricCount>;

}  // namespace emoint

#endif  // EMOINT_COMMON_METRICS_H_
