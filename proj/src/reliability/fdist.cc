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

#include "emoint/reliability/fdist.h"

#include <cmath>
#include <limits>

#include <fmt/core.h>

#include "emoint/common/error.h"

namespace emoint::reliability {

namespace {

constexpr double kTiny = 1e-300;
constexpr double kEps = 1e-16;
constexpr int kMaxTerms = 100000;

// Continued fraction for I_x(a, b) (modified Lentz).
double BetaContinuedFraction(double x, double a, double b) {
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxTerms; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < kEps) return h;
  }
  return h;
}

double LogBeta(double a, double b) {
  return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
}

// I_x(a, b) given both x and y = 1 - x, so callers in the upper tail keep
// full precision in y.
double IncompleteBetaXY(double x, double y, double a, double b) {
  if (x <= 0.0) return 0.0;
  if (y <= 0.0) return 1.0;
  const double log_front =
      a * std::log(x) + b * std::log(y) - LogBeta(a, b);
  const double front = std::exp(log_front);
  if (x < (a + 1.0) / (a + b + 2.0)) {
    return front * BetaContinuedFraction(x, a, b) / a;
  }
  return 1.0 - front * BetaContinuedFraction(y, b, a) / b;
}

void CheckDf(double df1, double df2) {
  if (!(df1 >= 1.0) || !(df2 >= 1.0) || !std::isfinite(df1) ||
      !std::isfinite(df2)) {
    throw Error(ErrorCode::kInvalidArgument,
                fmt::format("F degrees of freedom must be >= 1, got ({}, {})",
                            df1, df2));
  }
}

}  // namespace

double IncompleteBeta(double x, double a, double b) {
  if (!(a > 0.0) || !(b > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "beta shape must be positive");
  }
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  return IncompleteBetaXY(x, 1.0 - x, a, b);
}

double FCdf(double f, double df1, double df2) {
  CheckDf(df1, df2);
  if (!(f > 0.0)) return 0.0;
  if (std::isinf(f)) return 1.0;
  const double denom = df1 * f + df2;
  return IncompleteBetaXY(df1 * f / denom, df2 / denom, df1 / 2.0, df2 / 2.0);
}

double FPdf(double f, double df1, double df2) {
  CheckDf(df1, df2);
  if (!(f > 0.0) || std::isinf(f)) return 0.0;
  const double a = df1 / 2.0;
  const double b = df2 / 2.0;
  const double log_pdf = a * std::log(df1) + b * std::log(df2) +
                         (a - 1.0) * std::log(f) -
                         (a + b) * std::log(df1 * f + df2) - LogBeta(a, b);
  return std::exp(log_pdf);
}

double FQuantile(double p, double df1, double df2) {
  CheckDf(df1, df2);
  if (!(p > 0.0 && p < 1.0)) {
    throw Error(ErrorCode::kInvalidArgument,
                fmt::format("F quantile needs 0 < p < 1, got {}", p));
  }
  // Bracket the root, then Newton steps safeguarded by bisection in log
  // space.
  double lo = 0.0;
  double hi = 1.0;
  while (FCdf(hi, df1, df2) < p) {
    lo = hi;
    hi *= 4.0;
    if (hi > 1e300) return hi;
  }
  if (lo == 0.0) {
    lo = 1.0;
    while (FCdf(lo, df1, df2) > p) {
      hi = lo;
      lo /= 4.0;
      if (lo < 1e-300) return lo;
    }
  }
  double x = std::sqrt(lo * hi);
  for (int iter = 0; iter < 400; ++iter) {
    const double err = FCdf(x, df1, df2) - p;
    if (err == 0.0) return x;
    if (err < 0.0) {
      lo = x;
    } else {
      hi = x;
    }
    if ((hi - lo) <= 4 * std::numeric_limits<double>::epsilon() * hi) break;
    const double pdf = FPdf(x, df1, df2);
    double next = pdf > 0.0 ? x - err / pdf : -1.0;
    if (!(next > lo && next < hi)) next = std::sqrt(lo * hi);
    x = next;
  }
  // Pick the better bracket end.
  const double e_lo = std::fabs(FCdf(lo, df1, df2) - p);
  const double e_hi = std::fabs(FCdf(hi, df1, df2) - p);
  const double e_x = std::fabs(FCdf(x, df1, df2) - p);
  if (e_x <= e_lo && e_x <= e_hi) return x;
  return e_lo < e_hi ? lo : hi;
}

double TQuantile(double p, double df) {
  if (!(p > 0.0 && p < 1.0)) {
    throw Error(ErrorCode::kInvalidArgument,
                fmt::format("t quantile needs 0 < p < 1, got {}", p));
  }
  if (p == 0.5) return 0.0;
  if (p < 0.5) return -TQuantile(1.0 - p, df);
  return std::sqrt(FQuantile(2.0 * p - 1.0, 1.0, df));
}

}  // namespace emoint::reliability
