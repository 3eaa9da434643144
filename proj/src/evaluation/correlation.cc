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

#include "emoint/evaluation/correlation.h"

#include <algorithm>
#include <cmath>

#include <fmt/core.h>

#include "emoint/common/error.h"
#include "emoint/common/stats.h"

namespace emoint::evaluation {

double Pearson(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) {
    throw Error(ErrorCode::kDegenerateInput,
                fmt::format("length mismatch {} vs {}", x.size(), y.size()));
  }
  if (x.size() < 3) {
    throw Error(ErrorCode::kDegenerateInput,
                fmt::format("need at least 3 pairs, got {}", x.size()));
  }
  const double mx = Mean(x);
  const double my = Mean(y);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (AllEqual(x) || AllEqual(y) || sxx <= 0.0 || syy <= 0.0) {
    throw Error(ErrorCode::kDegenerateInput, "constant input has no correlation");
  }
  const double r = sxy / std::sqrt(sxx * syy);
  return std::clamp(r, -1.0, 1.0);
}

SdProfile ComputeSdProfile(
    const std::map<std::string, std::vector<MetricArray>>& ratings) {
  SdProfile p;
  std::array<std::vector<double>, kMetricCount> means, pooled;
  for (const auto& [id, rs] : ratings) {
    if (rs.empty()) continue;
    ++p.texts;
    p.labels += rs.size();
    for (std::size_t m = 0; m < kMetricCount; ++m) {
      double s = 0.0;
      for (const MetricArray& r : rs) {
        s += r[m];
        pooled[m].push_back(r[m]);
      }
      means[m].push_back(s / static_cast<double>(rs.size()));
    }
  }
  if (p.texts == 0) throw Error(ErrorCode::kNoData, "no ratings for SD profile");
  for (std::size_t m = 0; m < kMetricCount; ++m) {
    p.sd_after[m] = PopulationSd(means[m]);
    p.sd_before[m] = PopulationSd(pooled[m]);
  }
  return p;
}

}  // namespace emoint::evaluation
