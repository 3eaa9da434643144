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

#include "emoint/common/metrics.h"

#include <fmt/core.h>

#include "emoint/common/error.h"

namespace emoint {

std::string_view MetricKey(Metric m) {
  switch (m) {
    case Metric::kHappiness: return "happiness";
    case Metric::kSadness: return "sadness";
    case Metric::kAnger: return "anger";
    case Metric::kDisgust: return "disgust";
    case Metric::kFear: return "fear";
    case Metric::kPride: return "pride";
    case Metric::kValence: return "valence";
    case Metric::kArousal: return "arousal";
  }
  return "";
}

std::string_view MetricLabel(Metric m) {
  switch (m) {
    case Metric::kHappiness: return "Happiness";
    case Metric::kSadness: return "Sadness";
    case Metric::kAnger: return "Anger";
    case Metric::kDisgust: return "Disgust";
    case Metric::kFear: return "Fear";
    case Metric::kPride: return "Pride";
    case Metric::kValence: return "Valence";
    case Metric::kArousal: return "Arousal";
  }
  return "";
}

std::optional<Metric> ParseMetric(std::string_view key) {
  for (Metric m : kAllMetrics) {
    if (MetricKey(m) == key) return m;
  }
  return std::nullopt;
}

Metric MetricFromKey(std::string_view key) {
  if (auto m = ParseMetric(key)) return *m;
  throw Error(ErrorCode::kInvalidArgument,
              fmt::format("unknown metric '{}'", key));
}

std::string_view FamilyKey(MetricFamily f) {
  return f == MetricFamily::kBasic ? "basic" : "dimensional";
}

}  // namespace emoint
