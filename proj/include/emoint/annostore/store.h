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

#ifndef EMOINT_ANNOSTORE_STORE_H_
#define EMOINT_ANNOSTORE_STORE_H_

#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "emoint/annostore/plan.h"
#include "emoint/annostore/rating.h"

struct sqlite3;

namespace emoint::annostore {

struct SetProgress {
  std::string set_id;
  std::size_t done = 0;
  std::size_t total = 0;
};

struct SubmitAck {
  RatingStatus status = RatingStatus::kDraft;
  SetProgress progress;
};

struct NextText {
  std::string set_id;
  // Absent once every text in the set has a final rating.
  std::optional<std::string> text_id;
  std::string clean_text;
  std::size_t position = 0;
  std::size_t total = 0;
  std::optional<RawLabels> draft;
};

struct ResumeState {
  std::vector<SetProgress> pending;
  // First unrated text of the current set; absent when nothing is pending.
  std::optional<NextText> current;
};

// Ratings, plan and texts in a single SQLite file. Methods are safe to call
// from concurrent server threads; each call is one short transaction.
class AnnotationStore {
 public:
  using Clock = std::function<std::string()>;

  // ":memory:" opens a private in-memory database.
  explicit AnnotationStore(const std::string& path);
  ~AnnotationStore();
  AnnotationStore(const AnnotationStore&) = delete;
  AnnotationStore& operator=(const AnnotationStore&) = delete;

  void set_clock(Clock clock);

  // Loads texts (id -> clean text), sets and assignments. Every text named
  // by the plan must be present in `texts`.
  void ImportPlan(const AssignmentPlan& plan,
                  const std::map<std::string, std::string>& texts);
  void RegisterAnnotator(const std::string& annotator_id,
                         const std::string& token);
  bool CheckToken(const std::string& annotator_id,
                  const std::string& token) const;
  bool HasAnnotator(const std::string& annotator_id) const;

  // Drafts overwrite drafts; a final rating is immutable. Throws
  // kNotAssigned, kScaleViolation or kAlreadyFinal.
  SubmitAck Submit(RatingRecord record);

  std::vector<SetProgress> Progress(const std::string& annotator_id) const;
  NextText Next(const std::string& annotator_id,
                const std::string& set_id) const;
  void Postpone(const std::string& annotator_id, const std::string& set_id);
  // Throws kUnknownAnnotator.
  ResumeState Resume(const std::string& annotator_id) const;

  // Throws kNoRatings when the text has no final rating.
  TextAggregate Aggregate(const std::string& text_id) const;

  // Final ratings ordered by (text_id, annotator_id).
  std::vector<RatingRecord> FinalRatings() const;
  std::size_t CountRatings(RatingStatus status) const;
  void Export(const std::filesystem::path& path) const;

 private:
  struct Db;

  bool IsAssigned(const std::string& annotator_id,
                  const std::string& set_id) const;
  SetProgress ProgressFor(const std::string& annotator_id,
                          const std::string& set_id) const;
  NextText NextLocked(const std::string& annotator_id,
                      const std::string& set_id) const;
  std::vector<SetProgress> ProgressLocked(
      const std::string& annotator_id) const;

  std::unique_ptr<Db> db_;
  Clock clock_;
  mutable std::mutex mu_;
};

// Current UTC time as "YYYY-MM-DDTHH:MM:SSZ".
std::string UtcNow();

}  // namespace emoint::annostore

#endif  // EMOINT_ANNOSTORE_STORE_H_
