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

#ifndef EMOINT_RELIABILITY_ICC_H_
#define EMOINT_RELIABILITY_ICC_H_

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace emoint::reliability {

// Complete n x k matrix, one row per text. Columns carry no rater
// identity: the one-way design treats every rating of a text as coming
// from a different random rater.
class RatingMatrix {
 public:
  // Throws kInvalidMatrix unless n >= 2, k >= 2, values.size() == n * k and
  // every value is finite.
  RatingMatrix(std::size_t n, std::size_t k, std::vector<double> values);

  static RatingMatrix FromRows(const std::vector<std::vector<double>>& rows);

  std::size_t n() const { return n_; }
  std::size_t k() const { return k_; }
  double at(std::size_t row, std::size_t col) const {
    return values_[row * k_ + col];
  }
  std::span<const double> row(std::size_t i) const {
    return {values_.data() + i * k_, k_};
  }
  const std::vector<double>& values() const { return values_; }

 private:
  std::size_t n_;
  std::size_t k_;
  std::vector<double> values_;
};

struct AnovaResult {
  double ssb = 0.0;
  double ssw = 0.0;
  double msb = 0.0;
  double msw = 0.0;
  int df_between = 0;
  int df_within = 0;
};

// One-way random-effects ANOVA. Throws kDegenerateVariance when
// MSB = MSW = 0.
AnovaResult AnovaOneWay(const RatingMatrix& matrix);

enum class IccKind { kIcc1, kIcc1k };
enum class ReliabilityBand { kPoor, kModerate, kGood, kExcellent };

std::string_view IccKindName(IccKind kind);
std::string_view BandName(ReliabilityBand band);

// Koo & Li cutoffs: < 0.50 poor, [0.50, 0.75) moderate, [0.75, 0.90] good,
// > 0.90 excellent.
ReliabilityBand BandFor(double estimate);

struct IccResult {
  IccKind kind = IccKind::kIcc1;
  double estimate = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  // +inf when MSW = 0.
  double f_value = 0.0;
  int df1 = 0;
  int df2 = 0;
  ReliabilityBand band = ReliabilityBand::kPoor;
};

IccResult Icc1(const RatingMatrix& matrix, double alpha = 0.05);
// Throws kDegenerateVariance when MSB = 0 (the average-measure ratio is
// undefined).
IccResult Icc1k(const RatingMatrix& matrix, double alpha = 0.05);

// "Valence ICC(1) 0.60 [0.59, 0.61]"
std::string FormatIccRow(std::string_view label, const IccResult& r);

}  // namespace emoint::reliability

#endif  // EMOINT_RELIABILITY_ICC_H_
