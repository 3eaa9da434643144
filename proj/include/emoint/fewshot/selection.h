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

#ifndef EMOINT_FEWSHOT_SELECTION_H_
#define EMOINT_FEWSHOT_SELECTION_H_

#include <string>
#include <vector>

#include "emoint/common/metrics.h"

namespace emoint::fewshot {

inline constexpr int kMaxShots = 5;

// Ordered positions on [lo, hi] used to spread exemplars along the scale.
// Throws kBadK unless 1 <= k <= 5.
std::vector<double> TargetPoints(int k, double lo = 0.0, double hi = 1.0);

struct Candidate {
  std::string text_id;
  std::string clean_text;
  double centroid_dist = 0.0;
  // Averaged human labels on the canonical [0,1] scale.
  MetricArray gold{};
};

struct Exemplar {
  std::string text_id;
  std::string clean_text;
  double gold = 0.0;
  // Gold mapped to the 1..5 reply scale.
  int score = 1;
};

struct ShotPlan {
  Metric metric = Metric::kHappiness;
  int k = 0;
  std::vector<Exemplar> exemplars;
  std::string prompt_prefix;
};

// Canonical gold -> 1..5, rounded half up.
int GoldToScore(double canonical);

// For each target point in ascending order, picks the remaining candidate
// with the smallest sum of its centroid-distance rank and its |gold - t|
// rank (competition ranks from 1, ties to the lexicographically smallest
// id) and removes it from the pool. k = 0 yields an empty plan. Throws kBadK
// and kNotEnoughCandidates. The prompt prefix is left empty.
ShotPlan SelectExemplars(const std::vector<Candidate>& candidates,
                         Metric metric, int k);

}  // namespace emoint::fewshot

#endif  // EMOINT_FEWSHOT_SELECTION_H_
