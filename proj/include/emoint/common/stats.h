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

#ifndef EMOINT_COMMON_STATS_H_
#define EMOINT_COMMON_STATS_H_

#include <span>

namespace emoint {

double Mean(std::span<const double> xs);
// Normalised by n.
double PopulationSd(std::span<const double> xs);
// Normalised by n - 1.
double SampleSd(std::span<const double> xs);
bool AllEqual(std::span<const double> xs);

}  // namespace emoint

#endif  // EMOINT_COMMON_STATS_H_
