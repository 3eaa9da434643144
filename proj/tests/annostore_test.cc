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
#include <set>
#include <string>
#include <vector>

#include <fmt/core.h>
#include <gtest/gtest.h>

#include "emoint/annostore/plan.h"
#include "emoint/annostore/rating.h"
#include "emoint/annostore/server.h"
#include "emoint/annostore/store.h"
#include "emoint/common/error.h"
#include "emoint/common/rng.h"
#include "httplib.h"
#include "json.hpp"

namespace emoint::annostore {
namespace {

using nlohmann::json;

std::vector<std::string> Ids(const std::string& prefix, std::size_t n) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back(fmt::format("{}{:05}", prefix, i));
  return out;
}

ErrorCode CodeOf(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::kInvalidArgument;
}

void ExpectPlanInvariants(const AssignmentPlan& plan,
                          const std::vector<std::string>& texts,
                          std::size_t annotators) {
  const std::size_t r = plan.options.raters_per_set;
  std::set<std::string> seen;
  for (const TextSet& s : plan.sets) {
    EXPECT_EQ(s.text_ids.size(), plan.options.set_size);
    std::set<std::string> distinct(s.text_ids.begin(), s.text_ids.end());
    EXPECT_EQ(distinct.size(), s.text_ids.size());
    seen.insert(s.text_ids.begin(), s.text_ids.end());
  }
  EXPECT_EQ(seen, std::set<std::string>(texts.begin(), texts.end()));

  std::map<std::string, int> coverage;
  std::size_t lo = SIZE_MAX, hi = 0;
  ASSERT_EQ(plan.assignments.size(), annotators);
  for (const auto& [who, sets] : plan.assignments) {
    std::set<std::string> distinct(sets.begin(), sets.end());
    EXPECT_EQ(distinct.size(), sets.size()) << who;
    for (const auto& s : sets) ++coverage[s];
    lo = std::min(lo, sets.size());
    hi = std::max(hi, sets.size());
  }
  EXPECT_LE(hi - lo, 1u);
  EXPECT_EQ(plan.TotalSlots(), r * plan.sets.size());
  for (const TextSet& s : plan.sets) EXPECT_EQ(coverage[s.set_id], int(r));
}

TEST(BuildPlanTest, FullScale) {
  const auto texts = Ids("t", 10000);
  const auto people = Ids("a", 20);
  const AssignmentPlan plan = BuildPlan(texts, people, 7);
  EXPECT_EQ(plan.sets.size(), 100u);
  EXPECT_EQ(plan.TotalSlots(), 500u);
  for (const auto& [who, sets] : plan.assignments) EXPECT_EQ(sets.size(), 25u);
  ExpectPlanInvariants(plan, texts, 20);
}

TEST(BuildPlanTest, SingleSetForcesEveryone) {
  const auto texts = Ids("t", 100);
  const auto people = Ids("a", 5);
  const AssignmentPlan plan = BuildPlan(texts, people, 1);
  ASSERT_EQ(plan.sets.size(), 1u);
  for (const auto& [who, sets] : plan.assignments) {
    ASSERT_EQ(sets.size(), 1u);
    EXPECT_EQ(sets[0], plan.sets[0].set_id);
  }
}

TEST(BuildPlanTest, TooFewAnnotatorsIsInfeasible) {
  EXPECT_EQ(CodeOf([] { BuildPlan(Ids("t", 200), Ids("a", 4), 1); }),
            ErrorCode::kInfeasiblePlan);
}

TEST(BuildPlanTest, IndivisibleOrOverQuotaIsInfeasible) {
  EXPECT_EQ(CodeOf([] { BuildPlan(Ids("t", 150), Ids("a", 5), 1); }),
            ErrorCode::kInfeasiblePlan);
  // 100 sets x 5 raters over 10 people is 50 sets each, above 25.
  EXPECT_EQ(CodeOf([] { BuildPlan(Ids("t", 10000), Ids("a", 10), 1); }),
            ErrorCode::kInfeasiblePlan);
}

TEST(BuildPlanTest, DeterministicForSeed) {
  const auto texts = Ids("t", 1000);
  const auto people = Ids("a", 7);
  EXPECT_EQ(PlanToJson(BuildPlan(texts, people, 3)),
            PlanToJson(BuildPlan(texts, people, 3)));
  EXPECT_NE(PlanToJson(BuildPlan(texts, people, 3)),
            PlanToJson(BuildPlan(texts, people, 4)));
}

TEST(BuildPlanTest, BalancePropertyUnevenCounts) {
  Rng rng(99);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t sets = 1 + rng.Index(30);
    const std::size_t people = 5 + rng.Index(15);
    PlanOptions options;
    options.set_size = 10;
    const auto texts = Ids("t", sets * 10);
    const AssignmentPlan plan =
        BuildPlan(texts, Ids("a", people), rng.NextBits(), options);
    ExpectPlanInvariants(plan, texts, people);
  }
}

TEST(BuildPlanTest, JsonRoundTrip) {
  const AssignmentPlan plan = BuildPlan(Ids("t", 300), Ids("a", 6), 5);
  EXPECT_EQ(PlanToJson(PlanFromJson(PlanToJson(plan))), PlanToJson(plan));
}

RawLabels Labels(int e, int dim) {
  return {e, e, e, e, e, e, dim, dim};
}

class StoreTest : public ::testing::Test {
 protected:
  void SetUp() override {
    store_.set_clock([] { return std::string("2026-01-01T00:00:00Z"); });
    PlanOptions options;
    options.set_size = 100;
    options.raters_per_set = 1;
    plan_.options = options;
    TextSet s1{"S001", {}};
    TextSet s2{"S002", {}};
    for (int i = 0; i < 100; ++i) {
      s1.text_ids.push_back(fmt::format("a{:03}", i));
      s2.text_ids.push_back(fmt::format("b{:03}", i));
    }
    plan_.sets = {s1, s2};
    plan_.assignments["alice"] = {"S001", "S002"};
    plan_.assignments["bob"] = {"S002"};
    std::map<std::string, std::string> texts;
    for (const auto& s : plan_.sets) {
      for (const auto& id : s.text_ids) texts[id] = "tekst " + id;
    }
    store_.ImportPlan(plan_, texts);
    store_.RegisterAnnotator("alice", "pw-alice");
    store_.RegisterAnnotator("bob", "pw-bob");
  }

  RatingRecord Make(const std::string& who, const std::string& text,
                    const std::string& set, RawLabels labels, bool final) {
    RatingRecord r;
    r.annotator_id = who;
    r.text_id = text;
    r.set_id = set;
    r.labels = labels;
    r.status = final ? RatingStatus::kFinal : RatingStatus::kDraft;
    return r;
  }

  AnnotationStore store_{":memory:"};
  AssignmentPlan plan_;
};

TEST_F(StoreTest, DraftThenFinalThenRejected) {
  auto ack = store_.Submit(Make("alice", "a000", "S001", Labels(1, 2), false));
  EXPECT_EQ(ack.status, RatingStatus::kDraft);
  EXPECT_EQ(ack.progress.done, 0u);
  store_.Submit(Make("alice", "a000", "S001", Labels(2, 3), false));
  ack = store_.Submit(Make("alice", "a000", "S001", Labels(3, 4), true));
  EXPECT_EQ(ack.status, RatingStatus::kFinal);
  EXPECT_EQ(ack.progress.done, 1u);
  EXPECT_EQ(ack.progress.total, 100u);
  EXPECT_EQ(CodeOf([&] {
              store_.Submit(Make("alice", "a000", "S001", Labels(0, 1), false));
            }),
            ErrorCode::kAlreadyFinal);
  const auto finals = store_.FinalRatings();
  ASSERT_EQ(finals.size(), 1u);
  EXPECT_EQ(finals[0].labels, Labels(3, 4));
  EXPECT_EQ(finals[0].submitted_at, "2026-01-01T00:00:00Z");
}

TEST_F(StoreTest, ScaleViolation) {
  RawLabels bad = Labels(2, 3);
  bad[0] = 5;
  EXPECT_EQ(CodeOf([&] {
              store_.Submit(Make("alice", "a001", "S001", bad, true));
            }),
            ErrorCode::kScaleViolation);
  // Valence and arousal start at 1.
  EXPECT_EQ(CodeOf([&] {
              store_.Submit(Make("alice", "a001", "S001", Labels(2, 0), true));
            }),
            ErrorCode::kScaleViolation);
  EXPECT_EQ(store_.CountRatings(RatingStatus::kFinal), 0u);
}

TEST_F(StoreTest, NotAssigned) {
  EXPECT_EQ(CodeOf([&] {
              store_.Submit(Make("bob", "a000", "S001", Labels(1, 1), true));
            }),
            ErrorCode::kNotAssigned);
  // Text outside the claimed set.
  EXPECT_EQ(CodeOf([&] {
              store_.Submit(Make("alice", "a000", "S002", Labels(1, 1), true));
            }),
            ErrorCode::kNotAssigned);
  EXPECT_EQ(CodeOf([&] { store_.Next("bob", "S001"); }),
            ErrorCode::kNotAssigned);
}

TEST_F(StoreTest, NotAssignedCheckedBeforeScale) {
  RawLabels bad = Labels(9, 9);
  EXPECT_EQ(CodeOf([&] {
              store_.Submit(Make("bob", "a000", "S001", bad, true));
            }),
            ErrorCode::kNotAssigned);
}

TEST_F(StoreTest, FinalRowsCannotBeMutatedInSql) {
  store_.Submit(Make("alice", "a000", "S001", Labels(1, 1), true));
  // A second submit path attempt must fail and leave the row intact.
  EXPECT_THROW(
      store_.Submit(Make("alice", "a000", "S001", Labels(4, 5), true)),
      Error);
  EXPECT_EQ(store_.FinalRatings().at(0).labels, Labels(1, 1));
}

TEST_F(StoreTest, ResumeAfterForty) {
  for (int i = 0; i < 40; ++i) {
    store_.Submit(Make("alice", fmt::format("a{:03}", i), "S001",
                       Labels(1, 2), true));
  }
  store_.Submit(Make("alice", "a040", "S001", Labels(3, 4), false));
  const ResumeState state = store_.Resume("alice");
  ASSERT_EQ(state.pending.size(), 2u);
  EXPECT_EQ(state.pending[0].done, 40u);
  ASSERT_TRUE(state.current);
  EXPECT_EQ(state.current->set_id, "S001");
  EXPECT_EQ(state.current->position, 40u);
  EXPECT_EQ(state.current->text_id, "a040");
  ASSERT_TRUE(state.current->draft);
  EXPECT_EQ(*state.current->draft, Labels(3, 4));
  // Idempotent.
  EXPECT_EQ(store_.Resume("alice").current->position, 40u);
}

TEST_F(StoreTest, FreshAnnotatorStartsAtZero) {
  const ResumeState state = store_.Resume("bob");
  ASSERT_EQ(state.pending.size(), 1u);
  ASSERT_TRUE(state.current);
  EXPECT_EQ(state.current->set_id, "S002");
  EXPECT_EQ(state.current->position, 0u);
  EXPECT_EQ(state.current->text_id, "b000");
  EXPECT_FALSE(state.current->draft);
}

TEST_F(StoreTest, AllCompleteGivesEmptyPending) {
  for (int i = 0; i < 100; ++i) {
    store_.Submit(Make("bob", fmt::format("b{:03}", i), "S002", Labels(0, 1),
                       true));
  }
  const ResumeState state = store_.Resume("bob");
  EXPECT_TRUE(state.pending.empty());
  EXPECT_FALSE(state.current);
  const NextText next = store_.Next("bob", "S002");
  EXPECT_FALSE(next.text_id);
  EXPECT_EQ(next.position, 100u);
}

TEST_F(StoreTest, PostponedSetIsResumed) {
  store_.Submit(Make("alice", "b000", "S002", Labels(1, 1), true));
  store_.Postpone("alice", "S002");
  const ResumeState state = store_.Resume("alice");
  ASSERT_TRUE(state.current);
  EXPECT_EQ(state.current->set_id, "S002");
  EXPECT_EQ(state.current->position, 1u);
}

TEST_F(StoreTest, UnknownAnnotator) {
  EXPECT_EQ(CodeOf([&] { store_.Resume("carol"); }),
            ErrorCode::kUnknownAnnotator);
}

TEST_F(StoreTest, TokensAreChecked) {
  EXPECT_TRUE(store_.CheckToken("alice", "pw-alice"));
  EXPECT_FALSE(store_.CheckToken("alice", "pw-bob"));
  EXPECT_FALSE(store_.CheckToken("carol", "pw-alice"));
}

TEST_F(StoreTest, ExportRoundTrip) {
  store_.Submit(Make("bob", "b001", "S002", Labels(2, 5), true));
  store_.Submit(Make("alice", "b001", "S002", Labels(1, 3), true));
  store_.Submit(Make("alice", "a005", "S001", Labels(0, 1), false));
  const auto path =
      std::filesystem::temp_directory_path() / "emoint_export_test.csv";
  store_.Export(path);
  const auto back = ReadExport(path);
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back[0].annotator_id, "alice");
  EXPECT_EQ(back[1].annotator_id, "bob");
  EXPECT_EQ(back[1].labels, Labels(2, 5));
  std::filesystem::remove(path);
}

TEST_F(StoreTest, StoreAggregate) {
  EXPECT_EQ(CodeOf([&] { store_.Aggregate("b002"); }), ErrorCode::kNoRatings);
  store_.Submit(Make("bob", "b002", "S002", Labels(2, 5), true));
  const TextAggregate agg = store_.Aggregate("b002");
  EXPECT_EQ(agg.count, 1u);
  EXPECT_DOUBLE_EQ(agg.mean[0], 0.5);
  EXPECT_DOUBLE_EQ(agg.mean[6], 1.0);
  EXPECT_DOUBLE_EQ(agg.sd[0], 0.0);
}

TEST_F(StoreTest, PersistsAcrossReopen) {
  const auto path =
      std::filesystem::temp_directory_path() / "emoint_store_test.sqlite";
  std::filesystem::remove(path);
  {
    AnnotationStore disk(path.string());
    std::map<std::string, std::string> texts;
    for (const auto& s : plan_.sets) {
      for (const auto& id : s.text_ids) texts[id] = id;
    }
    disk.ImportPlan(plan_, texts);
    RatingRecord r = Make("bob", "b000", "S002", Labels(1, 2), true);
    disk.Submit(r);
  }
  AnnotationStore disk(path.string());
  EXPECT_EQ(disk.CountRatings(RatingStatus::kFinal), 1u);
  EXPECT_EQ(disk.Resume("bob").current->position, 1u);
  std::filesystem::remove(path);
}

RatingRecord Rated(int e) {
  RatingRecord r;
  r.labels = Labels(e, 1 + e);
  r.status = RatingStatus::kFinal;
  return r;
}

TEST(AggregateTest, KnownSpread) {
  std::vector<RatingRecord> rs = {Rated(0), Rated(1), Rated(1), Rated(2),
                                  Rated(4)};
  const TextAggregate agg = AggregateRatings("t", rs);
  // Canonical values 0, .25, .25, .5, 1: mean .4, population variance .115.
  EXPECT_NEAR(agg.mean[0], 0.4, 1e-15);
  EXPECT_NEAR(agg.sd[0], std::sqrt(0.115), 1e-15);
  EXPECT_NEAR(agg.mean[7], 0.4, 1e-15);
  EXPECT_EQ(agg.count, 5u);
}

TEST(AggregateTest, IdenticalAndSingle) {
  std::vector<RatingRecord> same(5, Rated(3));
  const TextAggregate agg = AggregateRatings("t", same);
  EXPECT_DOUBLE_EQ(agg.mean[0], 0.75);
  EXPECT_EQ(agg.sd[0], 0.0);
  std::vector<RatingRecord> one = {Rated(2)};
  const TextAggregate single = AggregateRatings("t", one);
  EXPECT_DOUBLE_EQ(single.mean[2], 0.5);
  EXPECT_EQ(single.sd[2], 0.0);
  EXPECT_EQ(single.count, 1u);
  EXPECT_EQ(CodeOf([] { AggregateRatings("t", {}); }), ErrorCode::kNoRatings);
}

TEST(AggregateTest, OrderInvariant) {
  Rng rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<RatingRecord> rs;
    for (int i = 0; i < 7; ++i) {
      RatingRecord r;
      for (Metric m : kAllMetrics) {
        r.labels[Index(m)] = RawMin(m) + static_cast<int>(rng.Index(5));
      }
      rs.push_back(r);
    }
    const TextAggregate a = AggregateRatings("t", rs);
    rng.Shuffle(rs);
    const TextAggregate b = AggregateRatings("t", rs);
    for (std::size_t i = 0; i < kMetricCount; ++i) {
      EXPECT_NEAR(a.mean[i], b.mean[i], 1e-15);
      EXPECT_NEAR(a.sd[i], b.sd[i], 1e-15);
    }
  }
}

class ServerTest : public StoreTest {
 protected:
  void SetUp() override {
    StoreTest::SetUp();
    ServerOptions options;
    options.port = 0;
    server_ = std::make_unique<AnnotationServer>(store_, options);
    port_ = server_->Start();
  }
  void TearDown() override { server_->Stop(); }

  httplib::Client Client() {
    httplib::Client c("127.0.0.1", port_);
    c.set_connection_timeout(5);
    return c;
  }

  std::string Login(const std::string& who, const std::string& token) {
    auto c = Client();
    auto res = c.Post("/api/session",
                      json{{"annotator_id", who}, {"token", token}}.dump(),
                      "application/json");
    if (!res || res->status != 200) return "";
    return json::parse(res->body).at("session").get<std::string>();
  }

  httplib::Headers Auth(const std::string& session) {
    return {{"Authorization", "Bearer " + session}};
  }

  std::unique_ptr<AnnotationServer> server_;
  int port_ = 0;
};

json LabelJson(int e, int dim) { return LabelsToJson(Labels(e, dim)); }

TEST_F(ServerTest, SessionRequiresValidToken) {
  EXPECT_EQ(Login("alice", "wrong"), "");
  EXPECT_NE(Login("alice", "pw-alice"), "");
  auto c = Client();
  auto res = c.Get("/api/assignments");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 401);
  res = c.Get("/api/assignments", Auth("nope"));
  EXPECT_EQ(res->status, 401);
}

TEST_F(ServerTest, FullAnnotationFlow) {
  const std::string session = Login("alice", "pw-alice");
  auto c = Client();
  auto res = c.Get("/api/assignments", Auth(session));
  ASSERT_TRUE(res);
  ASSERT_EQ(res->status, 200);
  const json sets = json::parse(res->body).at("sets");
  ASSERT_EQ(sets.size(), 2u);
  EXPECT_EQ(sets[0].at("set_id"), "S001");
  EXPECT_EQ(sets[0].at("total"), 100);

  res = c.Get("/api/sets/S001/next", Auth(session));
  ASSERT_EQ(res->status, 200);
  json next = json::parse(res->body);
  EXPECT_EQ(next.at("text_id"), "a000");
  EXPECT_EQ(next.at("clean_text"), "tekst a000");
  EXPECT_EQ(next.at("position"), 0);

  json rating = {{"text_id", "a000"},
                 {"set_id", "S001"},
                 {"labels", LabelJson(2, 3)},
                 {"final", true}};
  res = c.Post("/api/ratings", Auth(session), rating.dump(),
               "application/json");
  ASSERT_EQ(res->status, 200) << res->body;
  const json ack = json::parse(res->body);
  EXPECT_EQ(ack.at("status"), "final");
  EXPECT_EQ(ack.at("progress").at("done"), 1);

  res = c.Post("/api/ratings", Auth(session), rating.dump(),
               "application/json");
  EXPECT_EQ(res->status, 409);
  EXPECT_EQ(json::parse(res->body).at("error"), "AlreadyFinal");

  res = c.Get("/api/sets/S001/next", Auth(session));
  next = json::parse(res->body);
  EXPECT_EQ(next.at("text_id"), "a001");
  EXPECT_EQ(next.at("position"), 1);
}

TEST_F(ServerTest, ErrorStatuses) {
  const std::string session = Login("bob", "pw-bob");
  auto c = Client();
  json rating = {{"text_id", "a000"},
                 {"set_id", "S001"},
                 {"labels", LabelJson(1, 2)},
                 {"final", true}};
  auto res = c.Post("/api/ratings", Auth(session), rating.dump(),
                    "application/json");
  EXPECT_EQ(res->status, 403);
  rating["text_id"] = "b000";
  rating["set_id"] = "S002";
  rating["labels"]["valence"] = 6;
  res = c.Post("/api/ratings", Auth(session), rating.dump(),
               "application/json");
  EXPECT_EQ(res->status, 422);
  res = c.Post("/api/ratings", Auth(session), "{not json",
               "application/json");
  EXPECT_EQ(res->status, 400);
  res = c.Get("/api/sets/S001/next", Auth(session));
  EXPECT_EQ(res->status, 403);
}

TEST_F(ServerTest, PostponeAndResumeWithDraft) {
  std::string session = Login("alice", "pw-alice");
  auto c = Client();
  json final_rating = {{"text_id", "b000"},
                       {"set_id", "S002"},
                       {"labels", LabelJson(1, 2)},
                       {"final", true}};
  c.Post("/api/ratings", Auth(session), final_rating.dump(),
         "application/json");
  json draft = {{"text_id", "b001"},
                {"set_id", "S002"},
                {"labels", LabelJson(3, 4)},
                {"final", false}};
  auto res = c.Post("/api/ratings", Auth(session), draft.dump(),
                    "application/json");
  ASSERT_EQ(res->status, 200);
  EXPECT_EQ(json::parse(res->body).at("status"), "draft");
  res = c.Post("/api/postpone", Auth(session),
               json{{"set_id", "S002"}}.dump(), "application/json");
  ASSERT_EQ(res->status, 200);

  session = Login("alice", "pw-alice");
  res = c.Get("/api/resume", Auth(session));
  ASSERT_EQ(res->status, 200);
  const json state = json::parse(res->body);
  EXPECT_EQ(state.at("pending").size(), 2u);
  const json& current = state.at("current");
  EXPECT_EQ(current.at("set_id"), "S002");
  EXPECT_EQ(current.at("text_id"), "b001");
  EXPECT_EQ(current.at("position"), 1);
  EXPECT_EQ(current.at("draft"), LabelJson(3, 4));
}

TEST_F(ServerTest, ConcurrentSessionsWriteIndependently) {
  const std::string a = Login("alice", "pw-alice");
  const std::string b = Login("bob", "pw-bob");
  std::vector<std::thread> threads;
  for (int t = 0; t < 2; ++t) {
    threads.emplace_back([&, t] {
      auto c = Client();
      const std::string& session = t == 0 ? a : b;
      for (int i = 0; i < 20; ++i) {
        json r = {{"text_id", fmt::format("b{:03}", i)},
                  {"set_id", "S002"},
                  {"labels", LabelJson(t, 1 + t)},
                  {"final", true}};
        auto res = c.Post("/api/ratings", Auth(session), r.dump(),
                          "application/json");
        EXPECT_TRUE(res && res->status == 200);
      }
    });
  }
  for (auto& th : threads) th.join();
  EXPECT_EQ(store_.CountRatings(RatingStatus::kFinal), 40u);
  EXPECT_EQ(store_.Aggregate("b005").count, 2u);
}

}  // namespace
}  // namespace emoint::annostore
