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

#ifndef EMOINT_RELIABILITY_SIMULATE_H_
#define EMOINT_RELIABILITY_SIMULATE_H_

#include <cstdint>

#include "emoint/reliability/icc.h"

namespace emoint::reliability {

struct RaterModel {
  std::size_t n = 100;
  std::size_t k = 5;
  double mean = 2.0;
  double sigma_between = 1.0;
  double sigma_within = 1.0;
  // Round and clamp to the 0..4 label scale.
  bool discretize = false;
};

// x_ij = mu_i + e_ij with mu_i ~ N(mean, sigma_between) and
// e_ij ~ N(0, sigma_within).
RatingMatrix SimulateRaters(const RaterModel& model, std::uint64_t seed);

// Population ICC(1) of the model: sb^2 / (sb^2 + sw^2).
double TrueIcc1(const RaterModel& model);
// Spearman-Brown projection of TrueIcc1 to the k-rater average.
double TrueIcc1k(const RaterModel& model);

}  // namespace emoint::reliability

#endif  // EMOINT_RELIABILITY_SIMULATE_H_
