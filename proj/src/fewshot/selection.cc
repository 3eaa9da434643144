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

#include "emoint/fewshot/selection.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <fmt/core.h>

#include "emoint/common/error.h"

namespace emoint::fewshot {
namespace {

// Competition ranks (1 + number of strictly smaller values).
std::vector<std::size_t> Ranks(const std::vector<double>& values) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<std::size_t> rank(values.size());
  for (std::size_t i = 0; i < order.size(); ++i) {
    rank[order[i]] = (i > 0 && values[order[i]] == values[order[i - 1]])
                         ? rank[order[i - 1]]
                         : i + 1;
  }
  return rank;
}

}  // namespace

std::vector<double> TargetPoints(int k, double lo, double hi) {
  const double span = hi - lo;
  switch (k) {
    case 1:
      return {lo + span / 2.0};
    case 2:
      return {lo, hi};
    case 3:
      return {lo, lo + span / 2.0, hi};
    case 4:
      return {lo + 0.2 * span, lo + 0.4 * span, lo + 0.6 * span,
              lo + 0.8 * span};
    case 5:
      return {lo + span / 6.0, lo + 2.0 * span / 6.0, lo + 3.0 * span / 6.0,
              lo + 4.0 * span / 6.0, lo + 5.0 * span / 6.0};
    default:
      throw Error(ErrorCode::kBadK,
                  fmt::format("k must be in 1..{}, got {}", kMaxShots, k));
  }
}

int GoldToScore(double canonical) {
  // Half-up rounding with slack for values such as 0.375 * 4 + 1 = 2.5.
  const double s = std::floor(1.0 + 4.0 * canonical + 0.5 + 1e-9);
  return static_cast<int>(std::clamp(s, 1.0, 5.0));
}

ShotPlan SelectExemplars(const std::vector<Candidate>& candidates,
                         Metric metric, int k) {
  if (k < 0 || k > kMaxShots) {
    throw Error(ErrorCode::kBadK,
                fmt::format("k must be in 0..{}, got {}", kMaxShots, k));
  }
  ShotPlan plan;
  plan.metric = metric;
  plan.k = k;
  if (k == 0) return plan;
  if (candidates.size() < static_cast<std::size_t>(k)) {
    throw Error(ErrorCode::kNotEnoughCandidates,
                fmt::format("{} candidates for {} shots", candidates.size(),
                            k));
  }
  std::vector<std::size_t> pool(candidates.size());
  std::iota(pool.begin(), pool.end(), 0);
  const std::size_t m = Index(metric);
  for (double t : TargetPoints(k)) {
    std::vector<double> dist(pool.size()), gap(pool.size());
    for (std::size_t i = 0; i < pool.size(); ++i) {
      dist[i] = candidates[pool[i]].centroid_dist;
      gap[i] = std::abs(candidates[pool[i]].gold[m] - t);
    }
    const auto rank_dist = Ranks(dist);
    const auto rank_gap = Ranks(gap);
    std::size_t best = 0;
    for (std::size_t i = 1; i < pool.size(); ++i) {
      const std::size_t a = rank_dist[i] + rank_gap[i];
      const std::size_t b = rank_dist[best] + rank_gap[best];
      if (a < b || (a == b && candidates[pool[i]].text_id <
                                  candidates[pool[best]].text_id)) {
        best = i;
      }
    }
    const Candidate& c = candidates[pool[best]];
    plan.exemplars.push_back(
        {c.text_id, c.clean_text, c.gold[m], GoldToScore(c.gold[m])});
    pool.erase(pool.begin() + static_cast<long>(best));
  }
  return plan;
}

}  // namespace emoint::fewshot
