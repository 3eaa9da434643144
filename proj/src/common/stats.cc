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

#include "emoint/common/stats.h"

#include <cmath>

namespace emoint {

double Mean(std::span<const double> xs) {
  if (xs.empty()) return 0.0;
  double sum = 0.0;
  for (double x : xs) sum += x;
  return sum / static_cast<double>(xs.size());
}

namespace {

double SumSquaredDeviations(std::span<const double> xs) {
  const double m = Mean(xs);
  double ss = 0.0;
  for (double x : xs) ss += (x - m) * (x - m);
  return ss;
}

}  // namespace

double PopulationSd(std::span<const double> xs) {
  if (xs.empty() || AllEqual(xs)) return 0.0;
  return std::sqrt(SumSquaredDeviations(xs) / static_cast<double>(xs.size()));
}

double SampleSd(std::span<const double> xs) {
  if (xs.size() < 2 || AllEqual(xs)) return 0.0;
  return std::sqrt(SumSquaredDeviations(xs) /
                   static_cast<double>(xs.size() - 1));
}

bool AllEqual(std::span<const double> xs) {
  for (double x : xs) {
    if (x != xs.front()) return false;
  }
  return true;
}

}  // namespace emoint
