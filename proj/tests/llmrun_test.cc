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

#include <chrono>
#include <filesystem>
#include <fstream>
#include <set>
#include <string>
#include <vector>

#include <fmt/core.h>
#include <gtest/gtest.h>

#include "emoint/common/csv.h"
#include "emoint/common/error.h"
#include "emoint/common/files.h"
#include "emoint/llmrun/client.h"
#include "emoint/llmrun/parse.h"
#include "emoint/llmrun/run.h"
#include "emoint/llmrun/stub_server.h"

namespace emoint::llmrun {
namespace {

namespace fs = std::filesystem;

ErrorCode CodeOf(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::kInvalidArgument;
}

TEST(ParseScoreTest, Examples) {
  EXPECT_EQ(ParseScore("3").score, 3);
  EXPECT_EQ(ParseScore(" 4.\n").score, 4);
  EXPECT_EQ(ParseScore("\"5\"").score, 5);
  EXPECT_EQ(ParseScore("\"\"\"2\"\"\"").score, 2);
  EXPECT_EQ(ParseScore("Nie mogę ocenić emocjonalności tego tekstu.").reason,
            RejectReason::kNoNumber);
  EXPECT_EQ(ParseScore("6").reason, RejectReason::kOutOfRange);
  EXPECT_EQ(ParseScore("0").reason, RejectReason::kOutOfRange);
  EXPECT_EQ(ParseScore("-2").reason, RejectReason::kOutOfRange);
  EXPECT_EQ(ParseScore("").reason, RejectReason::kNoNumber);
}

TEST(ParseScoreTest, ContradictionGuard) {
  EXPECT_EQ(ParseScore("3 albo 4").reason, RejectReason::kAmbiguous);
  EXPECT_EQ(ParseScore("3-4").reason, RejectReason::kAmbiguous);
  EXPECT_EQ(ParseScore("3.5").reason, RejectReason::kAmbiguous);
  // Repeats and values outside the scale do not contradict.
  EXPECT_EQ(ParseScore("Odpowiedź: 3. Tak, 3").score, 3);
  EXPECT_EQ(ParseScore("2 (na 10 punktów)").score, 2);
  EXPECT_EQ(ParseScore("Ocena 4/5").reason, RejectReason::kAmbiguous);
}

TEST(ParseScoreTest, PureAndConsistent) {
  for (const char* s : {"1", "x", "9", "4 4", "12", "-1 2"}) {
    const ParsedScore a = ParseScore(s);
    const ParsedScore b = ParseScore(s);
    EXPECT_EQ(a.score, b.score);
    EXPECT_EQ(a.reason, b.reason);
    EXPECT_EQ(a.ok(), a.reason == RejectReason::kNone);
  }
}

TEST(RetryTest, BackoffDoublesAndCaps) {
  RetryPolicy p;
  p.base_delay = std::chrono::milliseconds(100);
  p.max_delay = std::chrono::milliseconds(500);
  EXPECT_EQ(p.DelayAfter(1).count(), 100);
  EXPECT_EQ(p.DelayAfter(2).count(), 200);
  EXPECT_EQ(p.DelayAfter(3).count(), 400);
  EXPECT_EQ(p.DelayAfter(4).count(), 500);
}

class FlakyClient : public ChatClient {
 public:
  explicit FlakyClient(int failures) : failures_(failures) {}
  ChatReply Complete(const ChatRequest&) override {
    ++calls;
    if (failures_-- > 0) throw Error(ErrorCode::kTransportError, "down");
    return {"2", 10, 1};
  }
  int calls = 0;

 private:
  int failures_;
};

TEST(RetryTest, RetriesTransportErrors) {
  std::vector<long long> sleeps;
  Sleeper sleep = [&](std::chrono::milliseconds d) {
    sleeps.push_back(d.count());
  };
  RetryPolicy p;
  p.max_attempts = 4;
  p.base_delay = std::chrono::milliseconds(10);
  FlakyClient twice(2);
  const RetryResult r = CompleteWithRetry(twice, {"m", "x", 0}, p, sleep);
  EXPECT_TRUE(r.ok);
  EXPECT_EQ(r.attempts, 3);
  EXPECT_EQ(sleeps, (std::vector<long long>{10, 20}));

  sleeps.clear();
  FlakyClient forever(100);
  const RetryResult f = CompleteWithRetry(forever, {"m", "x", 0}, p, sleep);
  EXPECT_FALSE(f.ok);
  EXPECT_EQ(forever.calls, 4);
  EXPECT_EQ(sleeps.size(), 3u);
}

TEST(RateLimiterTest, SpacesRequests) {
  RateLimiter limiter(600.0, 1.0);  // 10 per second
  const auto t0 = std::chrono::steady_clock::now();
  for (int i = 0; i < 4; ++i) limiter.Acquire();
  const double s = std::chrono::duration<double>(
                       std::chrono::steady_clock::now() - t0)
                       .count();
  // First is free, three more at 0.1 s each.
  EXPECT_GE(s, 0.28);
  EXPECT_LT(s, 1.0);
  RateLimiter off(0.0);
  for (int i = 0; i < 1000; ++i) off.Acquire();
}

TEST(CostTest, Arithmetic) {
  PriceTable prices = {{"m", {1.0, 2.0}}};
  EXPECT_EQ(EstimateCost({}, prices).total, 0.0);
  LlmOutcome o;
  o.model = "m";
  o.tokens_in = 1000;
  o.tokens_out = 10;
  EXPECT_NEAR(EstimateCost({o}, prices).total, 0.00102, 1e-15);
  o.model = "other";
  EXPECT_EQ(CodeOf([&] { EstimateCost({o}, prices); }),
            ErrorCode::kUnknownModel);
  const auto table = PriceTableFromJson(
      {{"gpt", {{"input_per_million", 0.5}, {"output_per_million", 1.5}}}});
  EXPECT_EQ(table.at("gpt").output_per_million, 1.5);
}

TEST(OutcomeTest, JsonRoundTrip) {
  LlmOutcome o;
  o.text_id = "t1";
  o.metric = Metric::kFear;
  o.model = "m";
  o.raw_reply = "Nie wiem";
  o.status = OutcomeStatus::kRejected;
  o.reason = RejectReason::kNoNumber;
  const LlmOutcome back = OutcomeFromJson(OutcomeToJson(o));
  EXPECT_EQ(OutcomeToJson(back), OutcomeToJson(o));
  nlohmann::json bad = OutcomeToJson(o);
  bad["status"] = "ok";
  EXPECT_EQ(CodeOf([&] { OutcomeFromJson(bad); }), ErrorCode::kParseError);
}

class RunTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           fmt::format("emoint_llmrun_{}", ::testing::UnitTest::GetInstance()
                                               ->current_test_info()
                                               ->name());
    fs::remove_all(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::vector<LlmTask> Tasks(std::size_t n) {
    std::vector<LlmTask> tasks;
    for (Metric m : kAllMetrics) {
      for (std::size_t i = 0; i < n; ++i) {
        const std::string id = fmt::format("t{:03}", i);
        tasks.push_back({m, id,
                         fmt::format("[{}] Tekst 1: \"\"\"{}\"\"\" Twoja "
                                     "odpowiedź: ",
                                     MetricKey(m), id)});
      }
    }
    return tasks;
  }

  RunOptions Options(const std::string& run_id) {
    RunOptions o;
    o.run_id = run_id;
    o.runs_dir = dir_;
    o.model = "stub-model";
    o.parallelism = 3;
    o.retry.base_delay = std::chrono::milliseconds(1);
    o.sleep = [](std::chrono::milliseconds) {};
    return o;
  }

  fs::path dir_;
};

TEST_F(RunTest, FixedReplyAllOk) {
  StubChatServer stub({});
  stub.Start();
  HttpChatClient client({stub.ChatUrl(), "", 10});
  StubOptions fixed;
  const auto tasks = Tasks(10);
  const RunResult r = RunAnnotation(tasks, client, Options("fixed"));
  ASSERT_EQ(r.outcomes.size(), tasks.size());
  for (const auto& o : r.outcomes) {
    EXPECT_EQ(o.status, OutcomeStatus::kOk);
    EXPECT_EQ(o.parsed, 3);
  }
  EXPECT_EQ(r.manifest.at("rejected"), 0);
  EXPECT_EQ(r.manifest.at("shots").at("basic"), 3);
  EXPECT_EQ(r.manifest.at("shots").at("dimensional"), 2);
  EXPECT_EQ(r.manifest.at("temperature"), 0.0);
  EXPECT_TRUE(fs::exists(dir_ / "fixed" / "manifest.json"));
  EXPECT_EQ(stub.queries(), tasks.size());
}

TEST_F(RunTest, RejectionsConcentrateInOneMetric) {
  StubOptions options;
  options.mode = StubOptions::Mode::kRules;
  options.rules = {{"[fear]", "Nie mogę ocenić emocjonalności tego tekstu."}};
  options.reply = "2";
  StubChatServer stub(options);
  stub.Start();
  HttpChatClient client({stub.ChatUrl(), "", 10});
  const RunResult r = RunAnnotation(Tasks(12), client, Options("rules"));
  EXPECT_EQ(r.manifest.at("rejected"), 12);
  EXPECT_EQ(r.manifest.at("rejected_by_metric").at("fear"), 12);
  EXPECT_EQ(r.manifest.at("rejected_by_metric").at("anger"), 0);
  for (const auto& o : r.outcomes) {
    if (o.metric == Metric::kFear) {
      EXPECT_EQ(o.status, OutcomeStatus::kRejected);
      EXPECT_FALSE(o.parsed);
      EXPECT_FALSE(o.raw_reply.empty());
    } else {
      EXPECT_EQ(o.parsed, 2);
    }
  }
}

TEST_F(RunTest, ResumeNeverRequeries) {
  StubOptions options;
  options.mode = StubOptions::Mode::kHash;
  StubChatServer stub(options);
  stub.Start();
  HttpChatClient client({stub.ChatUrl(), "", 10});
  const auto tasks = Tasks(25);
  RunOptions first = Options("resume");
  first.query_budget = 77;
  const RunResult partial = RunAnnotation(tasks, client, first);
  EXPECT_FALSE(partial.complete);
  EXPECT_EQ(partial.queried, 77u);
  // Simulate a crash mid-write.
  {
    std::ofstream out(dir_ / "resume" / "outcomes.jsonl", std::ios::app);
    out << "{\"text_id\": \"t0";
  }
  const RunResult rest = RunAnnotation(tasks, client, Options("resume"));
  EXPECT_TRUE(rest.complete);
  EXPECT_EQ(rest.reused, 77u);
  EXPECT_EQ(rest.queried, tasks.size() - 77);
  EXPECT_EQ(stub.queries(), tasks.size());
  for (const auto& [prompt, count] : stub.PromptCounts()) {
    EXPECT_EQ(count, 1) << prompt;
  }
  // A third pass is a no-op.
  const RunResult again = RunAnnotation(tasks, client, Options("resume"));
  EXPECT_EQ(again.queried, 0u);
  EXPECT_EQ(again.outcomes.size(), tasks.size());
  EXPECT_EQ(stub.queries(), tasks.size());
}

TEST_F(RunTest, TransportErrorsRecordedThenRetriedOnResume) {
  StubOptions options;
  options.fail_first = 1000;
  StubChatServer stub(options);
  stub.Start();
  HttpChatClient client({stub.ChatUrl(), "", 10});
  RunOptions o = Options("flaky");
  o.retry.max_attempts = 2;
  o.parallelism = 1;
  const auto tasks = Tasks(1);
  const RunResult r = RunAnnotation(tasks, client, o);
  EXPECT_EQ(r.manifest.at("transport_error"), 8);
  for (const auto& out : r.outcomes) {
    EXPECT_EQ(out.status, OutcomeStatus::kTransportError);
    EXPECT_EQ(out.attempts, 2);
  }

  StubChatServer healthy({});
  healthy.Start();
  HttpChatClient good({healthy.ChatUrl(), "", 10});
  const RunResult fixed = RunAnnotation(tasks, good, o);
  EXPECT_EQ(fixed.queried, 8u);
  EXPECT_EQ(fixed.manifest.at("ok"), 8);
  EXPECT_EQ(LoadOutcomes(dir_ / "flaky" / "outcomes.jsonl").size(), 8u);
}

TEST_F(RunTest, FailFirstRecoversWithinAttempts) {
  StubOptions options;
  options.fail_first = 2;
  StubChatServer stub(options);
  stub.Start();
  HttpChatClient client({stub.ChatUrl(), "", 10});
  RunOptions o = Options("recover");
  o.parallelism = 1;
  const RunResult r = RunAnnotation(Tasks(2), client, o);
  EXPECT_EQ(r.manifest.at("ok"), 16);
  EXPECT_EQ(stub.failures(), 2u);
  EXPECT_EQ(r.outcomes.front().attempts, 3);
}

TEST_F(RunTest, CostAndExport) {
  StubChatServer stub({});
  stub.Start();
  HttpChatClient client({stub.ChatUrl(), "", 10});
  RunOptions o = Options("cost");
  o.prices = PriceTable{{"stub-model", {1.0, 2.0}}};
  const RunResult r = RunAnnotation(Tasks(3), client, o);
  const CostReport cost = EstimateCost(r.outcomes, *o.prices);
  EXPECT_NEAR(r.manifest.at("cost_total").get<double>(), cost.total, 1e-15);
  EXPECT_GT(cost.total, 0.0);
  WriteOutcomesCsv(dir_ / "o.csv", "cost", r.outcomes);
  const csv::Table t = csv::Read(dir_ / "o.csv");
  EXPECT_EQ(t.header, (csv::Row{"run_id", "metric", "text_id", "status",
                                "parsed", "tokens_in", "tokens_out"}));
  EXPECT_EQ(t.rows.size(), 24u);
  EXPECT_EQ(t.rows[0][3], "ok");
}

TEST_F(RunTest, ConfigErrors) {
  FlakyClient client(0);
  RunOptions o = Options("");
  EXPECT_EQ(CodeOf([&] { RunAnnotation(Tasks(1), client, o); }),
            ErrorCode::kConfigError);
  auto dup = Tasks(1);
  dup.push_back(dup.front());
  EXPECT_EQ(CodeOf([&] { RunAnnotation(dup, client, Options("dup")); }),
            ErrorCode::kConfigError);
}

TEST(StubTest, HashModeIsDeterministic) {
  StubOptions options;
  options.mode = StubOptions::Mode::kHash;
  StubChatServer a(options), b(options);
  for (const char* p : {"Tekst 1: \"\"\"a\"\"\" Twoja odpowiedź: ",
                        "xyz"}) {
    EXPECT_EQ(a.ReplyFor(p), b.ReplyFor(p));
    EXPECT_TRUE(ParseScore(a.ReplyFor(p)).ok());
  }
}

}  // namespace
}  // namespace emoint::llmrun
