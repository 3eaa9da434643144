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

#include "emoint/reliability/icc.h"

#include <cmath>
#include <limits>

#include <fmt/core.h>

#include "emoint/common/error.h"
#include "emoint/reliability/fdist.h"

namespace emoint::reliability {

RatingMatrix::RatingMatrix(std::size_t n, std::size_t k,
                           std::vector<double> values)
    : n_(n), k_(k), values_(std::move(values)) {
  if (n_ < 2 || k_ < 2) {
    throw Error(ErrorCode::kInvalidMatrix,
                fmt::format("rating matrix needs n >= 2 and k >= 2, got {}x{}",
                            n_, k_));
  }
  if (values_.size() != n_ * k_) {
    throw Error(ErrorCode::kInvalidMatrix,
                fmt::format("{}x{} matrix given {} values", n_, k_,
                            values_.size()));
  }
  for (double v : values_) {
    if (!std::isfinite(v)) {
      throw Error(ErrorCode::kInvalidMatrix, "rating matrix has a missing cell");
    }
  }
}

RatingMatrix RatingMatrix::FromRows(
    const std::vector<std::vector<double>>& rows) {
  const std::size_t k = rows.empty() ? 0 : rows.front().size();
  std::vector<double> values;
  values.reserve(rows.size() * k);
  for (const auto& row : rows) {
    if (row.size() != k) {
      throw Error(ErrorCode::kInvalidMatrix, "ragged rating matrix");
    }
    values.insert(values.end(), row.begin(), row.end());
  }
  return RatingMatrix(rows.size(), k, std::move(values));
}

AnovaResult AnovaOneWay(const RatingMatrix& matrix) {
  const std::size_t n = matrix.n();
  const std::size_t k = matrix.k();
  std::vector<double> row_means(n, 0.0);
  double grand = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (double v : matrix.row(i)) row_means[i] += v;
    grand += row_means[i];
    row_means[i] /= static_cast<double>(k);
  }
  grand /= static_cast<double>(n * k);

  AnovaResult r;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = row_means[i] - grand;
    r.ssb += d * d;
    for (double v : matrix.row(i)) {
      r.ssw += (v - row_means[i]) * (v - row_means[i]);
    }
  }
  r.ssb *= static_cast<double>(k);
  r.df_between = static_cast<int>(n - 1);
  r.df_within = static_cast<int>(n * (k - 1));
  r.msb = r.ssb / r.df_between;
  r.msw = r.ssw / r.df_within;
  if (r.msb == 0.0 && r.msw == 0.0) {
    throw Error(ErrorCode::kDegenerateVariance,
                "all ratings are identical; ICC is undefined");
  }
  return r;
}

std::string_view IccKindName(IccKind kind) {
  return kind == IccKind::kIcc1 ? "ICC(1)" : "ICC(1,k)";
}

std::string_view BandName(ReliabilityBand band) {
  switch (band) {
    case ReliabilityBand::kPoor: return "poor";
    case ReliabilityBand::kModerate: return "moderate";
    case ReliabilityBand::kGood: return "good";
    case ReliabilityBand::kExcellent: return "excellent";
  }
  return "poor";
}

ReliabilityBand BandFor(double estimate) {
  if (estimate < 0.50) return ReliabilityBand::kPoor;
  if (estimate < 0.75) return ReliabilityBand::kModerate;
  if (estimate <= 0.90) return ReliabilityBand::kGood;
  return ReliabilityBand::kExcellent;
}

namespace {

struct FBounds {
  double f = 0.0;
  double lower = 0.0;
  double upper = 0.0;
};

FBounds ConfidenceF(const AnovaResult& a, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "alpha must lie in (0, 1)");
  }
  FBounds b;
  const double q = 1.0 - alpha / 2.0;
  b.f = a.msw == 0.0 ? std::numeric_limits<double>::infinity()
                     : a.msb / a.msw;
  b.lower = b.f / FQuantile(q, a.df_between, a.df_within);
  b.upper = b.f * FQuantile(q, a.df_within, a.df_between);
  return b;
}

}  // namespace

IccResult Icc1(const RatingMatrix& matrix, double alpha) {
  const AnovaResult a = AnovaOneWay(matrix);
  const double k = static_cast<double>(matrix.k());
  const FBounds fb = ConfidenceF(a, alpha);
  IccResult r;
  r.kind = IccKind::kIcc1;
  r.f_value = fb.f;
  r.df1 = a.df_between;
  r.df2 = a.df_within;
  if (a.msw == 0.0) {
    r.estimate = r.ci_low = r.ci_high = 1.0;
  } else {
    r.estimate = (a.msb - a.msw) / (a.msb + (k - 1.0) * a.msw);
    r.ci_low = (fb.lower - 1.0) / (fb.lower + k - 1.0);
    r.ci_high = (fb.upper - 1.0) / (fb.upper + k - 1.0);
  }
  r.band = BandFor(r.estimate);
  return r;
}

IccResult Icc1k(const RatingMatrix& matrix, double alpha) {
  const AnovaResult a = AnovaOneWay(matrix);
  if (a.msb == 0.0) {
    throw Error(ErrorCode::kDegenerateVariance,
                "no between-text variance; ICC(1,k) is undefined");
  }
  const FBounds fb = ConfidenceF(a, alpha);
  IccResult r;
  r.kind = IccKind::kIcc1k;
  r.f_value = fb.f;
  r.df1 = a.df_between;
  r.df2 = a.df_within;
  if (a.msw == 0.0) {
    r.estimate = r.ci_low = r.ci_high = 1.0;
  } else {
    r.estimate = (a.msb - a.msw) / a.msb;
    r.ci_low = 1.0 - 1.0 / fb.lower;
    r.ci_high = 1.0 - 1.0 / fb.upper;
  }
  r.band = BandFor(r.estimate);
  return r;
}

std::string FormatIccRow(std::string_view label, const IccResult& r) {
  return fmt::format("{} {} {:.2f} [{:.2f}, {:.2f}]", label,
                     IccKindName(r.kind), r.estimate, r.ci_low, r.ci_high);
}

}  // namespace emoint::reliability
