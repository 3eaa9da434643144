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

#ifndef EMOINT_RELIABILITY_FDIST_H_
#define EMOINT_RELIABILITY_FDIST_H_

namespace emoint::reliability {

// Regularized incomplete beta I_x(a, b), continued-fraction evaluation.
double IncompleteBeta(double x, double a, double b);

double FCdf(double f, double df1, double df2);
double FPdf(double f, double df1, double df2);

// Inverse CDF of the F distribution. Requires 0 < p < 1 and df >= 1;
// throws kInvalidArgument otherwise. |FCdf(result) - p| <= 1e-10.
double FQuantile(double p, double df1, double df2);

// Student t inverse CDF, derived from FQuantile via t^2 ~ F(1, df).
double TQuantile(double p, double df);

}  // namespace emoint::reliability

#endif  // EMOINT_RELIABILITY_FDIST_H_
