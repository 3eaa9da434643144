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

#ifndef EMOINT_ANNOSTORE_PLAN_H_
#define EMOINT_ANNOSTORE_PLAN_H_

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "json.hpp"

namespace emoint::annostore {

struct PlanOptions {
  std::size_t set_size = 100;
  std::size_t raters_per_set = 5;
  // Pacing metadata; the service does not enforce it.
  std::size_t sets_per_week = 5;
  std::size_t weeks = 5;
};

struct TextSet {
  std::string set_id;
  std::vector<std::string> text_ids;
};

struct AssignmentPlan {
  PlanOptions options;
  std::vector<TextSet> sets;
  // Annotator -> set ids in working order; week = index / sets_per_week.
  std::map<std::string, std::vector<std::string>> assignments;

  std::size_t TotalSlots() const;
};

// Shuffles the texts into sets of options.set_size and gives every set to
// options.raters_per_set distinct annotators, keeping per-annotator loads
// within one set of each other. Throws kInfeasiblePlan when the texts do
// not divide into sets, there are fewer annotators than raters per set, or
// some load would exceed sets_per_week * weeks.
AssignmentPlan BuildPlan(const std::vector<std::string>& text_ids,
                         const std::vector<std::string>& annotator_ids,
                         std::uint64_t seed, const PlanOptions& options = {});

nlohmann::json PlanToJson(const AssignmentPlan& plan);
AssignmentPlan PlanFromJson(const nlohmann::json& j);

}  // namespace emoint::annostore

#endif  // EMOINT_ANNOSTORE_PLAN_H_
