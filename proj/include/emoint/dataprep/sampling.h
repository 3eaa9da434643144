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

#ifndef EMOINT_DATAPREP_SAMPLING_H_
#define EMOINT_DATAPREP_SAMPLING_H_

#include <cstdint>
#include <span>
#include <vector>

namespace emoint::dataprep {

struct SampleResult {
  // Indices into the input, in draw order.
  std::vector<std::size_t> weighted;
  std::vector<std::size_t> uniform;
};

// Draws n_weighted items without replacement using exponential keys
// (key = -ln(u) / w, smallest keys win), then n_uniform items uniformly
// from the rest. Zero-weight items are never drawn in the weighted phase.
//
// Throws kInsufficientPool when n_weighted + n_uniform exceeds the pool,
// kAllZeroWeights when fewer than n_weighted weights are positive, and
// kInvalidArgument on negative or non-finite weights.
SampleResult WeightedSample(std::span<const double> weights,
                            std::size_t n_weighted, std::size_t n_uniform,
                            std::uint64_t seed);

}  // namespace emoint::dataprep

#endif  // EMOINT_DATAPREP_SAMPLING_H_
