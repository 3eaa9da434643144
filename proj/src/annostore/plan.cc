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

#include "emoint/annostore/plan.h"

#include <algorithm>
#include <numeric>
#include <set>

#include <fmt/core.h>

#include "emoint/common/error.h"
#include "emoint/common/rng.h"

namespace emoint::annostore {

std::size_t AssignmentPlan::TotalSlots() const {
  std::size_t total = 0;
  for (const auto& [annotator, sets] : assignments) total += sets.size();
  return total;
}

AssignmentPlan BuildPlan(const std::vector<std::string>& text_ids,
                         const std::vector<std::string>& annotator_ids,
                         std::uint64_t seed, const PlanOptions& options) {
  const std::size_t n = text_ids.size();
  if (options.set_size == 0 || n == 0 || n % options.set_size != 0) {
    throw Error(ErrorCode::kInfeasiblePlan,
                fmt::format("{} texts do not divide into sets of {}", n,
                            options.set_size));
  }
  if (std::set<std::string>(text_ids.begin(), text_ids.end()).size() != n) {
    throw Error(ErrorCode::kInfeasiblePlan, "duplicate text ids");
  }
  const std::size_t a = annotator_ids.size();
  if (std::set<std::string>(annotator_ids.begin(), annotator_ids.end())
          .size() != a) {
    throw Error(ErrorCode::kInfeasiblePlan, "duplicate annotator ids");
  }
  const std::size_t r = options.raters_per_set;
  if (r == 0 || a < r) {
    throw Error(ErrorCode::kInfeasiblePlan,
                fmt::format("{} annotators cannot give each set {} raters", a,
                            r));
  }
  const std::size_t n_sets = n / options.set_size;
  const std::size_t slots = n_sets * r;
  const std::size_t max_load = (slots + a - 1) / a;
  const std::size_t capacity = options.sets_per_week * options.weeks;
  if (max_load > capacity) {
    throw Error(ErrorCode::kInfeasiblePlan,
                fmt::format("{} sets per annotator exceed the quota of {}",
                            max_load, capacity));
  }

  AssignmentPlan plan;
  plan.options = options;
  Rng rng(DeriveSeed(seed, 0));
  std::vector<std::string> shuffled = text_ids;
  rng.Shuffle(shuffled);
  const int width = std::max<int>(3, static_cast<int>(
                                         std::to_string(n_sets).size()));
  for (std::size_t s = 0; s < n_sets; ++s) {
    TextSet set;
    set.set_id = fmt::format("S{:0{}}", s + 1, width);
    set.text_ids.assign(
        shuffled.begin() + static_cast<long>(s * options.set_size),
        shuffled.begin() + static_cast<long>((s + 1) * options.set_size));
    plan.sets.push_back(std::move(set));
  }

  // Sets in random order each go to the r least-loaded annotators, ties
  // broken by a fresh random priority.
  std::vector<std::size_t> set_order(n_sets);
  std::iota(set_order.begin(), set_order.end(), 0);
  rng.Shuffle(set_order);
  std::vector<std::size_t> load(a, 0);
  for (const auto& id : annotator_ids) plan.assignments[id];
  std::vector<std::size_t> people(a);
  std::vector<std::uint64_t> priority(a);
  for (std::size_t s : set_order) {
    for (auto& p : priority) p = rng.NextBits();
    std::iota(people.begin(), people.end(), 0);
    std::sort(people.begin(), people.end(), [&](std::size_t x, std::size_t y) {
      return load[x] != load[y] ? load[x] < load[y] : priority[x] < priority[y];
    });
    for (std::size_t i = 0; i < r; ++i) {
      ++load[people[i]];
      plan.assignments[annotator_ids[people[i]]].push_back(
          plan.sets[s].set_id);
    }
  }
  return plan;
}

nlohmann::json PlanToJson(const AssignmentPlan& plan) {
  nlohmann::json sets = nlohmann::json::array();
  for (const TextSet& s : plan.sets) {
    sets.push_back({{"set_id", s.set_id}, {"text_ids", s.text_ids}});
  }
  return {
      {"set_size", plan.options.set_size},
      {"raters_per_set", plan.options.raters_per_set},
      {"sets_per_week", plan.options.sets_per_week},
      {"weeks", plan.options.weeks},
      {"sets", sets},
      {"assignments", plan.assignments},
  };
}

AssignmentPlan PlanFromJson(const nlohmann::json& j) {
  try {
    AssignmentPlan plan;
    plan.options.set_size = j.at("set_size").get<std::size_t>();
    plan.options.raters_per_set = j.at("raters_per_set").get<std::size_t>();
    plan.options.sets_per_week = j.at("sets_per_week").get<std::size_t>();
    plan.options.weeks = j.at("weeks").get<std::size_t>();
    for (const auto& s : j.at("sets")) {
      plan.sets.push_back({s.at("set_id").get<std::string>(),
                           s.at("text_ids").get<std::vector<std::string>>()});
    }
    plan.assignments =
        j.at("assignments")
            .get<std::map<std::string, std::vector<std::string>>>();
    return plan;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParseError, fmt::format("bad plan: {}", e.what()));
  }
}

}  // namespace emoint::annostore
