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

#ifndef EMOINT_TESTS_ORACLES_H_
#define EMOINT_TESTS_ORACLES_H_

// Independent reference computations used only by tests. None of these
// share code with the library paths they check.

#include <cmath>
#include <string>
#include <vector>

namespace emoint::testing_oracle {

struct Anova {
  long double msb;
  long double msw;
};

// Textbook computing formulas: SSB = sum(T_i^2)/k - G^2/(nk),
// SSW = sum(x^2) - sum(T_i^2)/k, in extended precision.
inline Anova OneWayAnova(const std::vector<std::vector<double>>& rows) {
  const long double n = rows.size();
  const long double k = rows.front().size();
  long double grand = 0, sum_sq = 0, sum_t2 = 0;
  for (const auto& row : rows) {
    long double t = 0;
    for (double x : row) {
      t += x;
      sum_sq += static_cast<long double>(x) * x;
    }
    grand += t;
    sum_t2 += t * t;
  }
  const long double ssb = sum_t2 / k - grand * grand / (n * k);
  const long double ssw = sum_sq - sum_t2 / k;
  return {ssb / (n - 1), ssw / (n * (k - 1))};
}

inline double Icc1(const std::vector<std::vector<double>>& rows) {
  const Anova a = OneWayAnova(rows);
  const long double k = rows.front().size();
  return static_cast<double>((a.msb - a.msw) / (a.msb + (k - 1) * a.msw));
}

inline double Icc1k(const std::vector<std::vector<double>>& rows) {
  const Anova a = OneWayAnova(rows);
  return static_cast<double>((a.msb - a.msw) / a.msb);
}

inline double FDensity(double x, double d1, double d2) {
  const double lb = std::lgamma(d1 / 2) + std::lgamma(d2 / 2) -
                    std::lgamma((d1 + d2) / 2);
  return std::exp((d1 / 2) * std::log(d1 / d2) + (d1 / 2 - 1) * std::log(x) -
                  ((d1 + d2) / 2) * std::log1p(d1 * x / d2) - lb);
}

// Composite Simpson integration of the density on [0, x]; valid for d1 >= 2
// where the density is bounded at 0.
inline double FCdfByQuadrature(double x, double d1, double d2) {
  const int panels = 20000;
  const double h = x / panels;
  double sum = 0.0;
  for (int i = 0; i <= panels; ++i) {
    const double t = i * h;
    const double fx = t == 0.0 ? (d1 == 2 ? 1.0 : 0.0) : FDensity(t, d1, d2);
    const double w = (i == 0 || i == panels) ? 1 : (i % 2 ? 4 : 2);
    sum += w * fx;
  }
  return sum * h / 3.0;
}

inline double FQuantileByQuadrature(double p, double d1, double d2) {
  double lo = 0.0, hi = 1.0;
  while (FCdfByQuadrature(hi, d1, d2) < p) hi *= 2;
  for (int i = 0; i < 100; ++i) {
    const double mid = 0.5 * (lo + hi);
    (FCdfByQuadrature(mid, d1, d2) < p ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

// Pearson r from the pairwise-difference identity
// cov ∝ sum_{i<j} (x_i - x_j)(y_i - y_j), never forming means.
inline double PearsonPairwise(const std::vector<double>& x,
                              const std::vector<double>& y) {
  long double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    for (std::size_t j = i + 1; j < x.size(); ++j) {
      const long double dx = static_cast<long double>(x[i]) - x[j];
      const long double dy = static_cast<long double>(y[i]) - y[j];
      sxy += dx * dy;
      sxx += dx * dx;
      syy += dy * dy;
    }
  }
  return static_cast<double>(sxy / std::sqrt(sxx * syy));
}

// Exhaustive exemplar pick: for each target, rank every remaining candidate
// by counting strictly smaller values, then scan for the minimum sum.
struct OracleCandidate {
  std::string id;
  double dist;
  double gold;
};

inline std::vector<std::string> SelectByBruteForce(
    std::vector<OracleCandidate> pool, const std::vector<double>& targets) {
  std::vector<std::string> picked;
  for (double t : targets) {
    long best = -1;
    int best_sum = 0;
    for (std::size_t i = 0; i < pool.size(); ++i) {
      int rank_d = 1, rank_g = 1;
      for (std::size_t j = 0; j < pool.size(); ++j) {
        if (pool[j].dist < pool[i].dist) ++rank_d;
        if (std::fabs(pool[j].gold - t) < std::fabs(pool[i].gold - t)) ++rank_g;
      }
      const int sum = rank_d + rank_g;
      if (best < 0 || sum < best_sum ||
          (sum == best_sum && pool[i].id < pool[best].id)) {
        best = static_cast<long>(i);
        best_sum = sum;
      }
    }
    picked.push_back(pool[best].id);
    pool.erase(pool.begin() + best);
  }
  return picked;
}


}  // namespace emoint::testing_oracle

#endif  // EMOINT_TESTS_ORACLES_H_
