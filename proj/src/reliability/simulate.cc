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

#include "emoint/reliability/simulate.h"

#include <algorithm>
#include <cmath>

#include <fmt/core.h>

#include "emoint/common/error.h"
#include "emoint/common/rng.h"

namespace emoint::reliability {

RatingMatrix SimulateRaters(const RaterModel& model, std::uint64_t seed) {
  if (model.sigma_between < 0.0 || model.sigma_within < 0.0 ||
      (model.sigma_between == 0.0 && model.sigma_within == 0.0)) {
    throw Error(ErrorCode::kInvalidArgument,
                "rater model needs nonnegative sigmas, not both zero");
  }
  Rng rng(seed);
  std::vector<double> values;
  values.reserve(model.n * model.k);
  for (std::size_t i = 0; i < model.n; ++i) {
    const double mu = rng.Normal(model.mean, model.sigma_between);
    for (std::size_t j = 0; j < model.k; ++j) {
      double x = mu + rng.Normal(0.0, model.sigma_within);
      if (model.discretize) x = std::clamp(std::round(x), 0.0, 4.0);
      values.push_back(x);
    }
  }
  return RatingMatrix(model.n, model.k, std::move(values));
}

double TrueIcc1(const RaterModel& model) {
  const double vb = model.sigma_between * model.sigma_between;
  const double vw = model.sigma_within * model.sigma_within;
  return vb / (vb + vw);
}

double TrueIcc1k(const RaterModel& model) {
  const double rho = TrueIcc1(model);
  const double k = static_cast<double>(model.k);
  return k * rho / (1.0 + (k - 1.0) * rho);
}

}  // namespace emoint::reliability
