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

#include "emoint/dataprep/splits.h"

#include <cmath>
#include <numeric>

#include <fmt/core.h>

#include "emoint/common/csv.h"
#include "emoint/common/error.h"
#include "emoint/common/rng.h"
#include "emoint/common/stats.h"
#include "emoint/dataprep/sampling.h"

namespace emoint::dataprep {

std::string_view PartitionName(Partition p) {
  switch (p) {
    case Partition::kTrain: return "train";
    case Partition::kVal: return "val";
    case Partition::kTest: return "test";
  }
  return "train";
}

Partition ParsePartition(std::string_view name) {
  if (name == "train") return Partition::kTrain;
  if (name == "val") return Partition::kVal;
  if (name == "test") return Partition::kTest;
  throw Error(ErrorCode::kParseError,
              fmt::format("unknown partition '{}'", name));
}

std::vector<double> ZscoreWeights(const std::vector<LabeledText>& labeled,
                                  const ZscoreSplitOptions& options) {
  const std::size_t n = labeled.size();
  const std::size_t used =
      options.include_dimensions ? kMetricCount : kBasicMetricCount;
  std::vector<double> sums(n, 0.0);
  std::vector<double> column(n);
  for (std::size_t m = 0; m < used; ++m) {
    for (std::size_t i = 0; i < n; ++i) column[i] = labeled[i].labels[m];
    const double sd = PopulationSd(column);
    if (!(sd > 0.0)) {
      throw Error(ErrorCode::kDegenerateMetric,
                  fmt::format("metric '{}' has zero spread",
                              MetricKey(kAllMetrics[m])));
    }
    const double mean = Mean(column);
    for (std::size_t i = 0; i < n; ++i) sums[i] += (column[i] - mean) / sd;
  }
  const double lowest = *std::min_element(sums.begin(), sums.end());
  for (double& s : sums) s = s - lowest + options.epsilon;
  return sums;
}

std::vector<SplitAssignment> ZscoreTestSplit(
    const std::vector<LabeledText>& labeled, const ZscoreSplitOptions& options,
    std::uint64_t seed) {
  const std::size_t n = labeled.size();
  if (n < 10) {
    throw Error(ErrorCode::kTooFewRecords,
                fmt::format("z-score split needs >= 10 texts, got {}", n));
  }
  const std::vector<double> weights = ZscoreWeights(labeled, options);
  const auto n_test = static_cast<std::size_t>(
      std::lround(options.test_frac * static_cast<double>(n)));
  const auto n_val = static_cast<std::size_t>(
      std::lround(options.val_frac * static_cast<double>(n)));
  if (n_test + n_val > n) {
    throw Error(ErrorCode::kInvalidArgument,
                "test and validation fractions exceed the data");
  }
  const SampleResult test =
      WeightedSample(weights, n_test, 0, DeriveSeed(seed, 0));

  std::vector<SplitAssignment> out(n);
  std::vector<bool> in_test(n, false);
  for (std::size_t i : test.weighted) in_test[i] = true;
  std::vector<std::size_t> rest;
  for (std::size_t i = 0; i < n; ++i) {
    out[i].text_id = labeled[i].text_id;
    if (in_test[i]) {
      out[i].partition = Partition::kTest;
    } else {
      rest.push_back(i);
    }
  }
  Rng rng(DeriveSeed(seed, 1));
  rng.Shuffle(rest);
  for (std::size_t j = 0; j < rest.size(); ++j) {
    out[rest[j]].partition = j < n_val ? Partition::kVal : Partition::kTrain;
  }
  return out;
}

std::vector<std::vector<SplitAssignment>> KfoldSplit(
    const std::vector<std::string>& text_ids, const KfoldOptions& options,
    std::uint64_t seed) {
  const std::size_t n = text_ids.size();
  if (options.k < 2) {
    throw Error(ErrorCode::kInvalidArgument, "k-fold needs k >= 2");
  }
  const auto k = static_cast<std::size_t>(options.k);
  if (n < k) {
    throw Error(ErrorCode::kTooFewRecords,
                fmt::format("{} ids cannot fill {} folds", n, k));
  }
  if (options.train_ratio <= 0 || options.val_ratio < 0) {
    throw Error(ErrorCode::kInvalidArgument, "bad train:val ratio");
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  Rng rng(DeriveSeed(seed, 0));
  rng.Shuffle(order);
  // Contiguous chunks of the shuffled order; sizes differ by at most one.
  std::vector<std::size_t> fold_of(n);
  std::size_t pos = 0;
  for (std::size_t f = 0; f < k; ++f) {
    const std::size_t size = n / k + (f < n % k ? 1 : 0);
    for (std::size_t c = 0; c < size; ++c) fold_of[order[pos++]] = f;
  }

  const double val_share =
      static_cast<double>(options.val_ratio) /
      static_cast<double>(options.train_ratio + options.val_ratio);
  std::vector<std::vector<SplitAssignment>> iterations(k);
  for (std::size_t f = 0; f < k; ++f) {
    std::vector<SplitAssignment>& out = iterations[f];
    out.resize(n);
    std::vector<std::size_t> rest;
    for (std::size_t i = 0; i < n; ++i) {
      out[i].text_id = text_ids[i];
      out[i].fold = static_cast<int>(f);
      if (fold_of[i] == f) {
        out[i].partition = Partition::kTest;
      } else {
        rest.push_back(i);
      }
    }
    Rng fold_rng(DeriveSeed(seed, f + 1));
    fold_rng.Shuffle(rest);
    const auto n_val = static_cast<std::size_t>(
        std::lround(val_share * static_cast<double>(rest.size())));
    for (std::size_t j = 0; j < rest.size(); ++j) {
      out[rest[j]].partition = j < n_val ? Partition::kVal : Partition::kTrain;
    }
  }
  return iterations;
}

void WriteSplits(const std::filesystem::path& path,
                 const std::vector<SplitAssignment>& assignments) {
  csv::Table table;
  table.header = {"text_id", "partition", "fold"};
  for (const auto& a : assignments) {
    table.rows.push_back({a.text_id, std::string(PartitionName(a.partition)),
                          a.fold ? std::to_string(*a.fold) : ""});
  }
  csv::Write(path, table);
}

std::vector<SplitAssignment> ReadSplits(const std::filesystem::path& path) {
  const csv::Table table = csv::Read(path);
  const std::size_t id = table.Column("text_id");
  const std::size_t part = table.Column("partition");
  const std::size_t fold = table.Column("fold");
  std::vector<SplitAssignment> out;
  for (const auto& row : table.rows) {
    SplitAssignment a{row[id], ParsePartition(row[part]), std::nullopt};
    if (!row[fold].empty()) a.fold = std::stoi(row[fold]);
    out.push_back(std::move(a));
  }
  return out;
}

}  // namespace emoint::dataprep
