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

#include "emoint/dataprep/sampling.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <fmt/core.h>

#include "emoint/common/error.h"
#include "emoint/common/rng.h"

namespace emoint::dataprep {

SampleResult WeightedSample(std::span<const double> weights,
                            std::size_t n_weighted, std::size_t n_uniform,
                            std::uint64_t seed) {
  const std::size_t n = weights.size();
  if (n_weighted + n_uniform > n) {
    throw Error(ErrorCode::kInsufficientPool,
                fmt::format("requested {} + {} items from a pool of {}",
                            n_weighted, n_uniform, n));
  }
  std::size_t positive = 0;
  for (double w : weights) {
    if (!std::isfinite(w) || w < 0.0) {
      throw Error(ErrorCode::kInvalidArgument,
                  "sampling weights must be finite and nonnegative");
    }
    if (w > 0.0) ++positive;
  }
  if (n_weighted > positive) {
    throw Error(ErrorCode::kAllZeroWeights,
                fmt::format("{} weighted draws but only {} positive weights",
                            n_weighted, positive));
  }

  Rng rng(seed);
  constexpr double kInf = std::numeric_limits<double>::infinity();
  std::vector<double> keys(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double u = rng.Uniform();
    keys[i] = weights[i] > 0.0 ? -std::log(u) / weights[i] : kInf;
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::partial_sort(order.begin(), order.begin() + n_weighted, order.end(),
                    [&](std::size_t a, std::size_t b) {
                      return keys[a] < keys[b] ||
                             (keys[a] == keys[b] && a < b);
                    });

  SampleResult result;
  result.weighted.assign(order.begin(), order.begin() + n_weighted);

  std::vector<bool> taken(n, false);
  for (std::size_t i : result.weighted) taken[i] = true;
  std::vector<std::size_t> rest;
  rest.reserve(n - n_weighted);
  for (std::size_t i = 0; i < n; ++i) {
    if (!taken[i]) rest.push_back(i);
  }
  // Partial Fisher-Yates over the remainder.
  for (std::size_t i = 0; i < n_uniform; ++i) {
    const std::size_t j = i + rng.Index(rest.size() - i);
    std::swap(rest[i], rest[j]);
    result.uniform.push_back(rest[i]);
  }
  return result;
}

}  // namespace emoint::dataprep
