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

#ifndef EMOINT_EVALUATION_CORRELATION_H_
#define EMOINT_EVALUATION_CORRELATION_H_

#include <map>
#include <span>
#include <string>
#include <vector>

#include "emoint/common/metrics.h"

namespace emoint::evaluation {

// Product-moment correlation. Throws kDegenerateInput for fewer than three
// pairs, mismatched lengths or a constant argument.
double Pearson(std::span<const double> x, std::span<const double> y);

struct SdProfile {
  // Population SD over per-text means.
  MetricArray sd_after{};
  // Population SD over every raw canonical label pooled.
  MetricArray sd_before{};
  std::size_t texts = 0;
  std::size_t labels = 0;
};

// Canonical ratings grouped by text. Throws kNoData when empty.
SdProfile ComputeSdProfile(
    const std::map<std::string, std::vector<MetricArray>>& ratings);

}  // namespace emoint::evaluation

#endif  // EMOINT_EVALUATION_CORRELATION_H_
