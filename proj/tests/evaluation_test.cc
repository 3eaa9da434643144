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

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <fmt/core.h>
#include <gtest/gtest.h>

#include "emoint/common/error.h"
#include "emoint/common/files.h"
#include "emoint/common/rng.h"
#include "emoint/evaluation/correlation.h"
#include "emoint/evaluation/predictions.h"
#include "emoint/evaluation/report.h"
#include "emoint/reliability/fdist.h"
#include "oracles.h"

namespace emoint::evaluation {
namespace {

using llmrun::LlmOutcome;
using llmrun::OutcomeStatus;

ErrorCode CodeOf(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::kInvalidArgument;
}

TEST(PearsonTest, Examples) {
  const std::vector<double> x = {1, 2, 3}, y = {1, 2, 4};
  EXPECT_NEAR(Pearson(x, y), 3.0 / std::sqrt(2.0 * 42.0 / 9.0), 1e-15);
  EXPECT_NEAR(Pearson(x, y), 0.9820, 5e-5);
  EXPECT_DOUBLE_EQ(Pearson(x, x), 1.0);
  const std::vector<double> c = {2, 2, 2};
  EXPECT_EQ(CodeOf([&] { Pearson(c, x); }), ErrorCode::kDegenerateInput);
  EXPECT_EQ(CodeOf([&] { Pearson(std::vector<double>{1, 2},
                                 std::vector<double>{1, 3}); }),
            ErrorCode::kDegenerateInput);
}

TEST(PearsonTest, MatchesOracleSymmetricAffine) {
  Rng rng(17);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = 3 + rng.Index(200);
    std::vector<double> x(n), y(n);
    const double rho = rng.Uniform() * 2 - 1;
    for (std::size_t i = 0; i < n; ++i) {
      x[i] = rng.Normal(0, 1);
      y[i] = rho * x[i] + rng.Normal(0, 1);
    }
    const double r = Pearson(x, y);
    EXPECT_NEAR(r, testing_oracle::PearsonPairwise(x, y), 1e-12);
    EXPECT_NEAR(r, Pearson(y, x), 1e-15);
    std::vector<double> ax(n);
    const double a = 0.1 + 10 * rng.Uniform(), b = rng.Normal(0, 5);
    for (std::size_t i = 0; i < n; ++i) ax[i] = a * x[i] + b;
    EXPECT_NEAR(Pearson(ax, y), r, 1e-12);
  }
}

TEST(SdProfileTest, Examples) {
  std::map<std::string, std::vector<MetricArray>> ratings;
  MetricArray a{}, b{}, c{}, d{};
  a[0] = 0.0;
  b[0] = 0.5;
  c[0] = 0.5;
  d[0] = 1.0;
  ratings["t1"] = {a, b};
  ratings["t2"] = {c, d};
  const SdProfile p = ComputeSdProfile(ratings);
  EXPECT_NEAR(p.sd_after[0], 0.25, 1e-15);
  EXPECT_NEAR(p.sd_before[0], std::sqrt(0.125), 1e-15);
  EXPECT_NEAR(p.sd_before[0], 0.3536, 5e-5);

  // Agreement everywhere: both spreads equal.
  ratings["t1"] = {b, b};
  ratings["t2"] = {d, d};
  const SdProfile q = ComputeSdProfile(ratings);
  EXPECT_NEAR(q.sd_after[0], q.sd_before[0], 1e-15);
  // Equal means, spread labels.
  ratings["t1"] = {a, d};
  ratings["t2"] = {d, a};
  const SdProfile s = ComputeSdProfile(ratings);
  EXPECT_EQ(s.sd_after[0], 0.0);
  EXPECT_GT(s.sd_before[0], 0.0);
  EXPECT_EQ(CodeOf([] { ComputeSdProfile({}); }), ErrorCode::kNoData);
}

std::map<std::string, MetricArray> RandomReference(Rng& rng, std::size_t n) {
  std::map<std::string, MetricArray> ref;
  for (std::size_t i = 0; i < n; ++i) {
    MetricArray v{};
    for (double& x : v) x = rng.Uniform();
    ref[fmt::format("t{:04}", i)] = v;
  }
  return ref;
}

std::vector<LlmOutcome> OutcomesWithNoise(
    const std::map<std::string, MetricArray>& ref, double sigma, Rng& rng,
    double reject_rate = 0.0) {
  std::vector<LlmOutcome> out;
  for (const auto& [id, v] : ref) {
    for (Metric m : kAllMetrics) {
      LlmOutcome o;
      o.text_id = id;
      o.metric = m;
      if (rng.Uniform() < reject_rate) {
        o.status = OutcomeStatus::kRejected;
      } else {
        const double s = 1 + 4 * v[Index(m)] + rng.Normal(0, sigma);
        o.parsed = std::clamp(static_cast<int>(std::lround(s)), 1, 5);
      }
      out.push_back(o);
    }
  }
  return out;
}

TEST(EvaluateTest, PairwiseDeletionAccounting) {
  Rng rng(4);
  const auto ref = RandomReference(rng, 200);
  const auto outcomes = OutcomesWithNoise(ref, 0.5, rng, 0.1);
  const PredictionSet preds = PredictionsFromOutcomes(outcomes, "llm", "r1");
  const EvalReport report = Evaluate(ref, preds);
  for (const MetricEval& e : report.metrics) {
    std::size_t rejected = 0;
    for (const auto& o : outcomes) {
      rejected += o.metric == e.metric && o.status != OutcomeStatus::kOk;
    }
    EXPECT_EQ(e.n_rejected, rejected);
    EXPECT_EQ(e.n_pairs + e.n_rejected, ref.size());
    ASSERT_TRUE(e.pearson_r);
    EXPECT_GT(*e.pearson_r, 0.5);
  }
  const std::string table = RenderMainTable(report);
  EXPECT_EQ(table.rfind("Emotion    Correlation  Model's SD  Annotator's SD\n", 0),
            0u)
      << table;
  EXPECT_NE(table.find("\nArousal "), std::string::npos);
  EXPECT_EQ(EvalReportToJson(report)["metrics"].size(), 8u);
}

std::vector<LlmOutcome> SweepOutcomes(const std::map<std::string, MetricArray>& ref,
                                      double sigma, std::uint64_t seed) {
  Rng rng(seed);
  return OutcomesWithNoise(ref, sigma, rng);
}

TEST(SweepTest, SelectsKnownArgmax) {
  Rng rng(9);
  const auto ref = RandomReference(rng, 300);
  std::map<int, std::vector<LlmOutcome>> by_k;
  const double sigma[] = {1.5, 1.2, 1.0, 0.2, 0.8, 1.1};
  for (int k = 0; k <= 5; ++k) by_k[k] = SweepOutcomes(ref, sigma[k], 100 + k);
  const SweepReport report = ShotSweepReport(by_k, ref, MetricFamily::kBasic,
                                             {0, 1, 2, 3, 4, 5});
  EXPECT_EQ(report.selected_k, 3);
  ASSERT_EQ(report.rows.size(), 6u);
  EXPECT_TRUE(report.rows[3].selected);
  const std::string table = RenderSweepTable(report);
  EXPECT_EQ(table.rfind("Type        r     SD    n Rejected\n", 0), 0u) << table;
  EXPECT_NE(table.find("Zero Shot"), std::string::npos);
  EXPECT_NE(table.find("Five Shot"), std::string::npos);
  EXPECT_NE(table.find("Selected: Three Shot"), std::string::npos);
}

TEST(SweepTest, SingleKAndMissingK) {
  Rng rng(2);
  const auto ref = RandomReference(rng, 50);
  std::map<int, std::vector<LlmOutcome>> by_k = {{2, SweepOutcomes(ref, .5, 1)}};
  EXPECT_EQ(ShotSweepReport(by_k, ref, MetricFamily::kDimensional, {2})
                .selected_k,
            2);
  EXPECT_EQ(CodeOf([&] {
              ShotSweepReport(by_k, ref, MetricFamily::kDimensional, {0, 2});
            }),
            ErrorCode::kMissingK);
}

TEST(SweepTest, RejectionsCountOnlyFamily) {
  Rng rng(6);
  const auto ref = RandomReference(rng, 40);
  auto outcomes = SweepOutcomes(ref, 0.5, 3);
  int expected = 0;
  for (auto& o : outcomes) {
    if (o.metric == Metric::kFear && expected < 7) {
      o.status = OutcomeStatus::kRejected;
      o.parsed.reset();
      ++expected;
    }
    if (o.metric == Metric::kValence && o.text_id == "t0001") {
      o.status = OutcomeStatus::kRejected;
      o.parsed.reset();
    }
  }
  const SweepReport r =
      ShotSweepReport({{3, outcomes}}, ref, MetricFamily::kBasic, {3});
  EXPECT_EQ(r.rows[0].rejected, 7u);
}

TEST(FoldTest, Examples) {
  const auto flat = FoldAggregate({{Metric::kHappiness, std::vector<double>(10, 0.8)}});
  EXPECT_DOUBLE_EQ(flat[0].mean, 0.8);
  EXPECT_DOUBLE_EQ(flat[0].ci_low, 0.8);
  EXPECT_DOUBLE_EQ(flat[0].ci_high, 0.8);

  const auto two = FoldAggregate({{Metric::kFear, {0.6, 0.8}}}, 2);
  // One degree of freedom is Cauchy: t = tan(0.475 pi).
  const double half =
      std::tan(0.475 * M_PI) * std::sqrt(0.02) / std::sqrt(2.0);
  EXPECT_NEAR(two[0].mean, 0.7, 1e-15);
  EXPECT_NEAR(two[0].ci_low, 0.7 - half, 1e-12);
  EXPECT_NEAR(two[0].ci_high, 0.7 + half, 1e-12);

  EXPECT_EQ(CodeOf([] { FoldAggregate({{Metric::kFear, {0.6, 0.8}}}); }),
            ErrorCode::kWrongFoldCount);
}

TEST(FoldTest, RenderShape) {
  FoldSummary s;
  s.metric = Metric::kHappiness;
  s.mean = 0.8312;
  s.ci_low = 0.8204;
  s.ci_high = 0.8417;
  EXPECT_EQ(FormatFoldCell(s), "0.83 [0.82, 0.84]");
  const std::string t = RenderFoldTable({s});
  EXPECT_EQ(t, "Emotion  Happiness\nMean     0.83\nCI 95%   [0.82, 0.84]\n");
}

TEST(FoldTest, CiContainsMeanAndScales) {
  Rng rng(12);
  double w10 = 0.0, w40 = 0.0;
  const int reps = 3000;
  for (int rep = 0; rep < reps; ++rep) {
    for (int k : {10, 40}) {
      std::vector<double> folds(k);
      for (double& f : folds) f = 0.75 + rng.Normal(0, 0.02);
      for (auto method : {FoldCiMethod::kTRaw, FoldCiMethod::kFisherZ}) {
        const auto s = FoldAggregate({{Metric::kAnger, folds}}, k, method)[0];
        EXPECT_LE(s.ci_low, s.mean);
        EXPECT_GE(s.ci_high, s.mean);
        if (method == FoldCiMethod::kTRaw) {
          const double w = (s.ci_high - s.ci_low) /
                           (2 * reliability::TQuantile(0.975, k - 1));
          (k == 10 ? w10 : w40) += w / reps;
        }
      }
    }
  }
  // Width over t is sd / sqrt(k); the ratio is sqrt(4) up to the small
  // bias of the sample SD.
  EXPECT_NEAR(w10 / w40, 2.0, 0.1);
}

TEST(HistogramTest, Shapes) {
  const Histogram same =
      RawLabelHistogram("human", Metric::kAnger, std::vector<int>(30, 2));
  EXPECT_EQ(same.counts, (std::vector<std::size_t>{0, 0, 30, 0, 0}));
  std::vector<int> uniform;
  for (int i = 0; i < 100; ++i) uniform.push_back(i % 5);
  const Histogram u = RawLabelHistogram("human", Metric::kAnger, uniform);
  EXPECT_EQ(u.counts, (std::vector<std::size_t>{20, 20, 20, 20, 20}));
  const Histogram legacy =
      RawLabelHistogram("human", Metric::kAnger, uniform, 5, true);
  EXPECT_EQ(legacy.counts, (std::vector<std::size_t>{20, 20, 20, 20, 20}));
  std::vector<int> dims;
  for (int i = 0; i < 50; ++i) dims.push_back(1 + i % 5);
  EXPECT_EQ(RawLabelHistogram("human", Metric::kValence, dims).counts,
            (std::vector<std::size_t>{10, 10, 10, 10, 10}));
  EXPECT_EQ(CodeOf([] { LabelHistogram("x", Metric::kFear, {}); }),
            ErrorCode::kNoData);
}

TEST(HistogramTest, JsonRoundTrip) {
  Rng rng(1);
  std::vector<double> v(500);
  for (double& x : v) x = rng.Uniform();
  const Histogram h = LabelHistogram("llm", Metric::kPride, v, 7);
  std::size_t total = 0;
  for (auto c : h.counts) total += c;
  EXPECT_EQ(total, 500u);
  const auto j = HistogramToJson(h);
  EXPECT_EQ(HistogramToJson(HistogramFromJson(nlohmann::json::parse(j.dump()))),
            j);
}

SdProfile ProfileOf(const std::map<std::string, MetricArray>& ref) {
  std::map<std::string, std::vector<MetricArray>> r;
  for (const auto& [id, v] : ref) r[id] = {v};
  return ComputeSdProfile(r);
}

TEST(ComparisonTest, SelfComparisonIsOne) {
  Rng rng(21);
  const auto ref = RandomReference(rng, 100);
  const auto table = BuildComparison({PredictionsFromMeans(ref, "Human")}, ref,
                                     ProfileOf(ref));
  ASSERT_EQ(table.rows.size(), 1u);
  for (double r : table.rows[0].r) EXPECT_NEAR(r, 1.0, 1e-12);
}

TEST(ComparisonTest, LayoutAndOrderIndependence) {
  Rng rng(22);
  const auto ref = RandomReference(rng, 120);
  const PredictionSet llm =
      PredictionsFromOutcomes(OutcomesWithNoise(ref, 0.6, rng), "GPT4", "run");
  PredictionSet sup = PredictionsFromMeans(ref, "Supervised");
  for (auto& [id, row] : sup.rows) {
    for (auto& v : row) *v = std::clamp(*v + rng.Normal(0, 0.1), 0.0, 1.0);
  }
  const SdProfile p = ProfileOf(ref);
  const auto a = BuildComparison({llm, sup}, ref, p);
  const auto b = BuildComparison({sup, llm}, ref, p);
  EXPECT_EQ(ComparisonToJson(a), ComparisonToJson(b));
  EXPECT_EQ(ComparisonToCsv(a), ComparisonToCsv(b));
  const std::string text = RenderComparisonTable(a);
  std::vector<std::string> lines;
  for (std::size_t s = 0, e; (e = text.find('\n', s)) != std::string::npos;
       s = e + 1) {
    lines.push_back(text.substr(s, e - s));
  }
  ASSERT_EQ(lines.size(), 1u + 2 * 2 + 2);
  EXPECT_EQ(lines[0].rfind("Type", 0), 0u);
  EXPECT_NE(lines[0].find("Arousal"), std::string::npos);
  EXPECT_EQ(lines[1].rfind("GPT4", 0), 0u);
  EXPECT_NE(lines[2].find("("), std::string::npos);
  EXPECT_EQ(lines[5].rfind("Annotator's SD after averaging", 0), 0u);
  EXPECT_EQ(lines[6].rfind("Annotator's SD before averaging", 0), 0u);
  const auto csv_text = ComparisonToCsv(a);
  EXPECT_EQ(csv_text.rfind("source,statistic,happiness,", 0), 0u);
}

TEST(ComparisonTest, NoiseAttenuatesMonotonically) {
  Rng rng(30);
  const auto ref = RandomReference(rng, 2000);
  std::vector<PredictionSet> sets;
  for (double sigma : {0.05, 0.1, 0.2}) {
    PredictionSet s = PredictionsFromMeans(ref, fmt::format("s{:.2f}", sigma));
    for (auto& [id, row] : s.rows) {
      for (auto& v : row) *v += rng.Normal(0, sigma);
    }
    sets.push_back(s);
  }
  const auto t = BuildComparison(sets, ref, ProfileOf(ref));
  for (std::size_t m = 0; m < kMetricCount; ++m) {
    EXPECT_GT(t.rows[0].r[m], t.rows[1].r[m]);
    EXPECT_GT(t.rows[1].r[m], t.rows[2].r[m]);
    // Attenuation oracle: r = sd_ref / sqrt(sd_ref^2 + sigma^2).
    const double sd = 1.0 / std::sqrt(12.0);
    EXPECT_NEAR(t.rows[2].r[m], sd / std::sqrt(sd * sd + 0.04), 0.02);
  }
}

TEST(ComparisonTest, CoverageMismatch) {
  Rng rng(31);
  const auto ref = RandomReference(rng, 100);
  PredictionSet s = PredictionsFromMeans(ref, "partial");
  for (int i = 0; i < 6; ++i) s.rows.erase(fmt::format("t{:04}", i));
  EXPECT_EQ(CodeOf([&] { BuildComparison({s}, ref, ProfileOf(ref)); }),
            ErrorCode::kCoverageMismatch);
  EXPECT_NO_THROW(BuildComparison({s}, ref, ProfileOf(ref), 0.9));
}

TEST(PredictionsFileTest, RoundTripAndValidation) {
  const auto dir = std::filesystem::temp_directory_path() / "emoint_pred_test";
  std::filesystem::create_directories(dir);
  Rng rng(40);
  PredictionSet s = PredictionsFromMeans(RandomReference(rng, 10), "sup");
  s.rows["t0003"][2].reset();
  WritePredictions(dir / "p.csv", s);
  const PredictionSet back = ReadPredictions(dir / "p.csv", "sup");
  EXPECT_EQ(back.rows, s.rows);
  WriteFile(dir / "bad.csv",
            "text_id,happiness,sadness,anger,disgust,fear,pride,valence,"
            "arousal\nx,0.1,0.2,1.5,0,0,0,0,0\n");
  EXPECT_EQ(CodeOf([&] { ReadPredictions(dir / "bad.csv", "b"); }),
            ErrorCode::kParseError);
  std::filesystem::remove_all(dir);
}

}  // namespace
}  // namespace emoint::evaluation
