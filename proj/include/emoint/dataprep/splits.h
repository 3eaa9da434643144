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

#ifndef EMOINT_DATAPREP_SPLITS_H_
#define EMOINT_DATAPREP_SPLITS_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "emoint/common/metrics.h"

namespace emoint::dataprep {

enum class Partition { kTrain, kVal, kTest };

std::string_view PartitionName(Partition p);
Partition ParsePartition(std::string_view name);

struct SplitAssignment {
  std::string text_id;
  Partition partition = Partition::kTrain;
  std::optional<int> fold;

  bool operator==(const SplitAssignment&) const = default;
};

struct LabeledText {
  std::string text_id;
  // Canonical [0, 1] averaged labels.
  MetricArray labels{};
};

struct ZscoreSplitOptions {
  double test_frac = 0.10;
  double val_frac = 0.10;
  // Adds valence and arousal to the six basic emotions in the weight.
  bool include_dimensions = false;
  double epsilon = 1e-6;
};

// Test partition drawn with weights equal to the shifted sum of per-metric
// z-scores; the remainder is split uniformly into train and validation.
// Output follows input order.
std::vector<SplitAssignment> ZscoreTestSplit(
    const std::vector<LabeledText>& labeled, const ZscoreSplitOptions& options,
    std::uint64_t seed);

// Weights used by ZscoreTestSplit, exposed for inspection.
std::vector<double> ZscoreWeights(const std::vector<LabeledText>& labeled,
                                  const ZscoreSplitOptions& options);

struct KfoldOptions {
  int k = 10;
  int train_ratio = 889;
  int val_ratio = 111;
};

// One assignment list per iteration; in iteration i fold i is the test
// partition and every assignment carries fold = i. Lists follow input order.
std::vector<std::vector<SplitAssignment>> KfoldSplit(
    const std::vector<std::string>& text_ids, const KfoldOptions& options,
    std::uint64_t seed);

// Delimited "text_id,partition,fold"; fold is empty when unset.
void WriteSplits(const std::filesystem::path& path,
                 const std::vector<SplitAssignment>& assignments);
std::vector<SplitAssignment> ReadSplits(const std::filesystem::path& path);

}  // namespace emoint::dataprep

#endif  // EMOINT_DATAPREP_SPLITS_H_
