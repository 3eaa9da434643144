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

#ifndef EMOINT_RELIABILITY_AGREEMENT_H_
#define EMOINT_RELIABILITY_AGREEMENT_H_

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "emoint/common/metrics.h"
#include "emoint/reliability/icc.h"
#include "json.hpp"

namespace emoint::reliability {

struct MetricAgreement {
  Metric metric = Metric::kHappiness;
  std::optional<IccResult> icc1;
  std::optional<IccResult> icc1k;
  // Set when a metric's matrix is degenerate.
  std::string error;
};

struct AgreementReport {
  std::size_t raters = 0;
  std::size_t texts_used = 0;
  // Texts without exactly `raters` final ratings.
  std::size_t texts_excluded = 0;
  std::vector<MetricAgreement> metrics;
};

// Per text, the canonical label vectors of its final ratings.
using RatingsByText = std::map<std::string, std::vector<MetricArray>>;

// Builds one complete matrix per metric from texts rated exactly `raters`
// times. `raters` = 0 picks the most common rating count.
AgreementReport ComputeAgreement(const RatingsByText& ratings,
                                 std::size_t raters = 0, double alpha = 0.05);

// Table-shaped rendering: a header line, then two rows per metric.
std::string RenderAgreementTable(const AgreementReport& report);
// "Emotion,Type,ICC,CI low,CI high,F,df1,df2,band" rows.
std::string RenderAgreementCsv(const AgreementReport& report);
nlohmann::json AgreementToJson(const AgreementReport& report);

}  // namespace emoint::reliability

#endif  // EMOINT_RELIABILITY_AGREEMENT_H_
