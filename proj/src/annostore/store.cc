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

#include "emoint/annostore/store.h"

#include <sqlite3.h>

#include <chrono>
#include <ctime>

#include <fmt/core.h>

#include "emoint/common/error.h"
#include "emoint/common/hash.h"

namespace emoint::annostore {
namespace {

constexpr const char* kSchema = R"sql(
PRAGMA foreign_keys = ON;
CREATE TABLE IF NOT EXISTS texts (
  text_id TEXT PRIMARY KEY,
  clean_text TEXT NOT NULL
);
CREATE TABLE IF NOT EXISTS sets (
  set_id TEXT PRIMARY KEY,
  ordinal INTEGER NOT NULL
);
CREATE TABLE IF NOT EXISTS set_items (
  set_id TEXT NOT NULL REFERENCES sets(set_id),
  position INTEGER NOT NULL,
  text_id TEXT NOT NULL REFERENCES texts(text_id),
  PRIMARY KEY (set_id, position),
  UNIQUE (set_id, text_id)
);
CREATE TABLE IF NOT EXISTS annotators (
  annotator_id TEXT PRIMARY KEY,
  token_hash TEXT
);
CREATE TABLE IF NOT EXISTS assignments (
  annotator_id TEXT NOT NULL REFERENCES annotators(annotator_id),
  set_id TEXT NOT NULL REFERENCES sets(set_id),
  ordinal INTEGER NOT NULL,
  PRIMARY KEY (annotator_id, set_id)
);
CREATE TABLE IF NOT EXISTS ratings (
  annotator_id TEXT NOT NULL,
  text_id TEXT NOT NULL,
  set_id TEXT NOT NULL,
  happiness INTEGER NOT NULL,
  sadness INTEGER NOT NULL,
  anger INTEGER NOT NULL,
  disgust INTEGER NOT NULL,
  fear INTEGER NOT NULL,
  pride INTEGER NOT NULL,
  valence INTEGER NOT NULL,
  arousal INTEGER NOT NULL,
  submitted_at TEXT NOT NULL,
  status TEXT NOT NULL CHECK (status IN ('draft', 'final')),
  PRIMARY KEY (annotator_id, text_id)
);
CREATE TABLE IF NOT EXISTS postponed (
  annotator_id TEXT PRIMARY KEY,
  set_id TEXT NOT NULL
);
CREATE TRIGGER IF NOT EXISTS final_no_update
BEFORE UPDATE ON ratings WHEN OLD.status = 'final'
BEGIN SELECT RAISE(ABORT, 'final rating is immutable'); END;
CREATE TRIGGER IF NOT EXISTS final_no_delete
BEFORE DELETE ON ratings WHEN OLD.status = 'final'
BEGIN SELECT RAISE(ABORT, 'final rating is immutable'); END;
)sql";

const char* StatusName(RatingStatus s) {
  return s == RatingStatus::kFinal ? "final" : "draft";
}

// Thin RAII wrapper over a prepared statement.
class Stmt {
 public:
  Stmt(sqlite3* db, const char* sql) : db_(db) {
    if (sqlite3_prepare_v2(db, sql, -1, &stmt_, nullptr) != SQLITE_OK) {
      throw Error(ErrorCode::kIoError,
                  fmt::format("sqlite prepare: {}", sqlite3_errmsg(db)));
    }
  }
  ~Stmt() { sqlite3_finalize(stmt_); }
  Stmt(const Stmt&) = delete;
  Stmt& operator=(const Stmt&) = delete;

  Stmt& Bind(int i, const std::string& v) {
    sqlite3_bind_text(stmt_, i, v.c_str(), static_cast<int>(v.size()),
                      SQLITE_TRANSIENT);
    return *this;
  }
  Stmt& Bind(int i, long long v) {
    sqlite3_bind_int64(stmt_, i, v);
    return *this;
  }

  // True while rows remain.
  bool Step() {
    const int rc = sqlite3_step(stmt_);
    if (rc == SQLITE_ROW) return true;
    if (rc == SQLITE_DONE) return false;
    throw Error(ErrorCode::kIoError,
                fmt::format("sqlite step: {}", sqlite3_errmsg(db_)));
  }
  void Run() {
    while (Step()) {
    }
  }
  void Reset() {
    sqlite3_reset(stmt_);
    sqlite3_clear_bindings(stmt_);
  }

  std::string Text(int col) const {
    const auto* p = sqlite3_column_text(stmt_, col);
    return p == nullptr ? std::string()
                        : std::string(reinterpret_cast<const char*>(p));
  }
  long long Int(int col) const { return sqlite3_column_int64(stmt_, col); }

 private:
  sqlite3* db_;
  sqlite3_stmt* stmt_ = nullptr;
};

void Exec(sqlite3* db, const char* sql) {
  char* err = nullptr;
  if (sqlite3_exec(db, sql, nullptr, nullptr, &err) != SQLITE_OK) {
    std::string msg = err == nullptr ? "unknown" : err;
    sqlite3_free(err);
    throw Error(ErrorCode::kIoError, fmt::format("sqlite: {}", msg));
  }
}

struct Transaction {
  explicit Transaction(sqlite3* db) : db(db) { Exec(db, "BEGIN IMMEDIATE"); }
  ~Transaction() {
    if (!done) sqlite3_exec(db, "ROLLBACK", nullptr, nullptr, nullptr);
  }
  void Commit() {
    Exec(db, "COMMIT");
    done = true;
  }
  sqlite3* db;
  bool done = false;
};

RatingRecord RowToRecord(const Stmt& s) {
  RatingRecord r;
  r.annotator_id = s.Text(0);
  r.text_id = s.Text(1);
  r.set_id = s.Text(2);
  for (int i = 0; i < static_cast<int>(kMetricCount); ++i) {
    r.labels[static_cast<std::size_t>(i)] = static_cast<int>(s.Int(3 + i));
  }
  r.submitted_at = s.Text(11);
  r.status = s.Text(12) == "final" ? RatingStatus::kFinal : RatingStatus::kDraft;
  return r;
}

constexpr const char* kRatingColumns =
    "annotator_id, text_id, set_id, happiness, sadness, anger, disgust, "
    "fear, pride, valence, arousal, submitted_at, status";

}  // namespace

struct AnnotationStore::Db {
  sqlite3* handle = nullptr;
  ~Db() { sqlite3_close(handle); }
};

std::string UtcNow() {
  const std::time_t now =
      std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

AnnotationStore::AnnotationStore(const std::string& path)
    : db_(std::make_unique<Db>()), clock_(UtcNow) {
  if (path != ":memory:") {
    const auto parent = std::filesystem::path(path).parent_path();
    if (!parent.empty()) std::filesystem::create_directories(parent);
  }
  if (sqlite3_open_v2(path.c_str(), &db_->handle,
                      SQLITE_OPEN_READWRITE | SQLITE_OPEN_CREATE |
                          SQLITE_OPEN_FULLMUTEX,
                      nullptr) != SQLITE_OK) {
    throw Error(ErrorCode::kIoError,
                fmt::format("cannot open store '{}': {}", path,
                            sqlite3_errmsg(db_->handle)));
  }
  sqlite3_busy_timeout(db_->handle, 5000);
  Exec(db_->handle, kSchema);
}

AnnotationStore::~AnnotationStore() = default;

void AnnotationStore::set_clock(Clock clock) {
  std::lock_guard lock(mu_);
  clock_ = std::move(clock);
}

void AnnotationStore::ImportPlan(
    const AssignmentPlan& plan,
    const std::map<std::string, std::string>& texts) {
  std::lock_guard lock(mu_);
  sqlite3* db = db_->handle;
  Transaction tx(db);
  Stmt text(db, "INSERT OR REPLACE INTO texts VALUES (?, ?)");
  Stmt set(db, "INSERT OR REPLACE INTO sets VALUES (?, ?)");
  Stmt item(db, "INSERT OR REPLACE INTO set_items VALUES (?, ?, ?)");
  long long set_ordinal = 0;
  for (const TextSet& s : plan.sets) {
    set.Bind(1, s.set_id).Bind(2, set_ordinal++).Run();
    set.Reset();
    long long pos = 0;
    for (const std::string& id : s.text_ids) {
      const auto it = texts.find(id);
      if (it == texts.end()) {
        throw Error(ErrorCode::kInvalidArgument,
                    fmt::format("plan names unknown text '{}'", id));
      }
      text.Bind(1, id).Bind(2, it->second).Run();
      text.Reset();
      item.Bind(1, s.set_id).Bind(2, pos++).Bind(3, id).Run();
      item.Reset();
    }
  }
  Stmt annotator(db,
                 "INSERT OR IGNORE INTO annotators (annotator_id) VALUES (?)");
  Stmt assign(db, "INSERT OR REPLACE INTO assignments VALUES (?, ?, ?)");
  for (const auto& [who, sets] : plan.assignments) {
    annotator.Bind(1, who).Run();
    annotator.Reset();
    long long ordinal = 0;
    for (const std::string& s : sets) {
      assign.Bind(1, who).Bind(2, s).Bind(3, ordinal++).Run();
      assign.Reset();
    }
  }
  tx.Commit();
}

void AnnotationStore::RegisterAnnotator(const std::string& annotator_id,
                                        const std::string& token) {
  std::lock_guard lock(mu_);
  Stmt s(db_->handle,
         "INSERT INTO annotators VALUES (?, ?) ON CONFLICT(annotator_id) "
         "DO UPDATE SET token_hash = excluded.token_hash");
  s.Bind(1, annotator_id).Bind(2, Sha256Hex(token)).Run();
}

bool AnnotationStore::CheckToken(const std::string& annotator_id,
                                 const std::string& token) const {
  std::lock_guard lock(mu_);
  Stmt s(db_->handle,
         "SELECT token_hash FROM annotators WHERE annotator_id = ?");
  s.Bind(1, annotator_id);
  if (!s.Step()) return false;
  const std::string stored = s.Text(0);
  return !stored.empty() && stored == Sha256Hex(token);
}

bool AnnotationStore::HasAnnotator(const std::string& annotator_id) const {
  std::lock_guard lock(mu_);
  Stmt s(db_->handle, "SELECT 1 FROM annotators WHERE annotator_id = ?");
  s.Bind(1, annotator_id);
  return s.Step();
}

bool AnnotationStore::IsAssigned(const std::string& annotator_id,
                                 const std::string& set_id) const {
  Stmt s(db_->handle,
         "SELECT 1 FROM assignments WHERE annotator_id = ? AND set_id = ?");
  s.Bind(1, annotator_id).Bind(2, set_id);
  return s.Step();
}

SubmitAck AnnotationStore::Submit(RatingRecord record) {
  std::lock_guard lock(mu_);
  sqlite3* db = db_->handle;
  Transaction tx(db);
  if (record.set_id.empty()) {
    Stmt find(db,
              "SELECT i.set_id FROM set_items i JOIN assignments a "
              "ON a.set_id = i.set_id WHERE a.annotator_id = ? AND "
              "i.text_id = ? ORDER BY a.ordinal LIMIT 1");
    find.Bind(1, record.annotator_id).Bind(2, record.text_id);
    if (find.Step()) record.set_id = find.Text(0);
  }
  {
    Stmt member(db,
                "SELECT 1 FROM set_items i JOIN assignments a ON "
                "a.set_id = i.set_id WHERE a.annotator_id = ? AND "
                "i.set_id = ? AND i.text_id = ?");
    member.Bind(1, record.annotator_id)
        .Bind(2, record.set_id)
        .Bind(3, record.text_id);
    if (!member.Step()) {
      throw Error(ErrorCode::kNotAssigned,
                  fmt::format("text '{}' is not assigned to '{}'",
                              record.text_id, record.annotator_id));
    }
  }
  ValidateLabels(record.labels);
  {
    Stmt existing(db,
                  "SELECT status FROM ratings WHERE annotator_id = ? AND "
                  "text_id = ?");
    existing.Bind(1, record.annotator_id).Bind(2, record.text_id);
    if (existing.Step() && existing.Text(0) == "final") {
      throw Error(ErrorCode::kAlreadyFinal,
                  fmt::format("'{}' already finalized '{}'",
                              record.annotator_id, record.text_id));
    }
  }
  if (record.submitted_at.empty()) record.submitted_at = clock_();
  {
    Stmt upsert(db, fmt::format("INSERT OR REPLACE INTO ratings ({}) VALUES "
                                "(?, ?, ?, ?, ?, ?, ?, ?, ?, ?, ?, ?, ?)",
                                kRatingColumns)
                        .c_str());
    upsert.Bind(1, record.annotator_id)
        .Bind(2, record.text_id)
        .Bind(3, record.set_id);
    for (int i = 0; i < static_cast<int>(kMetricCount); ++i) {
      upsert.Bind(4 + i, static_cast<long long>(
                             record.labels[static_cast<std::size_t>(i)]));
    }
    upsert.Bind(12, record.submitted_at).Bind(13, StatusName(record.status));
    upsert.Run();
  }
  SubmitAck ack;
  ack.status = record.status;
  ack.progress = ProgressFor(record.annotator_id, record.set_id);
  tx.Commit();
  return ack;
}

SetProgress AnnotationStore::ProgressFor(const std::string& annotator_id,
                                         const std::string& set_id) const {
  SetProgress p;
  p.set_id = set_id;
  Stmt total(db_->handle, "SELECT COUNT(*) FROM set_items WHERE set_id = ?");
  total.Bind(1, set_id);
  total.Step();
  p.total = static_cast<std::size_t>(total.Int(0));
  Stmt done(db_->handle,
            "SELECT COUNT(*) FROM set_items i JOIN ratings r ON "
            "r.text_id = i.text_id WHERE i.set_id = ? AND "
            "r.annotator_id = ? AND r.status = 'final'");
  done.Bind(1, set_id).Bind(2, annotator_id);
  done.Step();
  p.done = static_cast<std::size_t>(done.Int(0));
  return p;
}

std::vector<SetProgress> AnnotationStore::ProgressLocked(
    const std::string& annotator_id) const {
  std::vector<std::string> sets;
  {
    Stmt s(db_->handle,
           "SELECT set_id FROM assignments WHERE annotator_id = ? "
           "ORDER BY ordinal");
    s.Bind(1, annotator_id);
    while (s.Step()) sets.push_back(s.Text(0));
  }
  std::vector<SetProgress> out;
  out.reserve(sets.size());
  for (const std::string& id : sets) out.push_back(ProgressFor(annotator_id, id));
  return out;
}

std::vector<SetProgress> AnnotationStore::Progress(
    const std::string& annotator_id) const {
  std::lock_guard lock(mu_);
  return ProgressLocked(annotator_id);
}

NextText AnnotationStore::NextLocked(const std::string& annotator_id,
                                     const std::string& set_id) const {
  if (!IsAssigned(annotator_id, set_id)) {
    throw Error(ErrorCode::kNotAssigned,
                fmt::format("set '{}' is not assigned to '{}'", set_id,
                            annotator_id));
  }
  NextText next;
  next.set_id = set_id;
  const SetProgress p = ProgressFor(annotator_id, set_id);
  next.total = p.total;
  next.position = p.total;
  Stmt first(db_->handle,
             "SELECT i.position, i.text_id, t.clean_text FROM set_items i "
             "JOIN texts t ON t.text_id = i.text_id WHERE i.set_id = ? AND "
             "NOT EXISTS (SELECT 1 FROM ratings r WHERE r.text_id = "
             "i.text_id AND r.annotator_id = ? AND r.status = 'final') "
             "ORDER BY i.position LIMIT 1");
  first.Bind(1, set_id).Bind(2, annotator_id);
  if (!first.Step()) return next;
  next.position = static_cast<std::size_t>(first.Int(0));
  next.text_id = first.Text(1);
  next.clean_text = first.Text(2);
  Stmt draft(db_->handle,
             fmt::format("SELECT {} FROM ratings WHERE annotator_id = ? AND "
                         "text_id = ? AND status = 'draft'",
                         kRatingColumns)
                 .c_str());
  draft.Bind(1, annotator_id).Bind(2, *next.text_id);
  if (draft.Step()) next.draft = RowToRecord(draft).labels;
  return next;
}

NextText AnnotationStore::Next(const std::string& annotator_id,
                               const std::string& set_id) const {
  std::lock_guard lock(mu_);
  return NextLocked(annotator_id, set_id);
}

void AnnotationStore::Postpone(const std::string& annotator_id,
                               const std::string& set_id) {
  std::lock_guard lock(mu_);
  if (!IsAssigned(annotator_id, set_id)) {
    throw Error(ErrorCode::kNotAssigned,
                fmt::format("set '{}' is not assigned to '{}'", set_id,
                            annotator_id));
  }
  Stmt s(db_->handle, "INSERT OR REPLACE INTO postponed VALUES (?, ?)");
  s.Bind(1, annotator_id).Bind(2, set_id).Run();
}

ResumeState AnnotationStore::Resume(const std::string& annotator_id) const {
  std::lock_guard lock(mu_);
  {
    Stmt known(db_->handle,
               "SELECT 1 FROM annotators WHERE annotator_id = ?");
    known.Bind(1, annotator_id);
    if (!known.Step()) {
      throw Error(ErrorCode::kUnknownAnnotator,
                  fmt::format("unknown annotator '{}'", annotator_id));
    }
  }
  ResumeState state;
  for (SetProgress& p : ProgressLocked(annotator_id)) {
    if (p.done < p.total) state.pending.push_back(std::move(p));
  }
  if (state.pending.empty()) return state;
  std::string current = state.pending.front().set_id;
  Stmt postponed(db_->handle,
                 "SELECT set_id FROM postponed WHERE annotator_id = ?");
  postponed.Bind(1, annotator_id);
  if (postponed.Step()) {
    const std::string held = postponed.Text(0);
    for (const SetProgress& p : state.pending) {
      if (p.set_id == held) current = held;
    }
  }
  state.current = NextLocked(annotator_id, current);
  return state;
}

TextAggregate AnnotationStore::Aggregate(const std::string& text_id) const {
  std::vector<RatingRecord> finals;
  {
    std::lock_guard lock(mu_);
    Stmt s(db_->handle,
           fmt::format("SELECT {} FROM ratings WHERE text_id = ? AND "
                       "status = 'final' ORDER BY annotator_id",
                       kRatingColumns)
               .c_str());
    s.Bind(1, text_id);
    while (s.Step()) finals.push_back(RowToRecord(s));
  }
  return AggregateRatings(text_id, finals);
}

std::vector<RatingRecord> AnnotationStore::FinalRatings() const {
  std::lock_guard lock(mu_);
  Stmt s(db_->handle,
         fmt::format("SELECT {} FROM ratings WHERE status = 'final' "
                     "ORDER BY text_id, annotator_id",
                     kRatingColumns)
             .c_str());
  std::vector<RatingRecord> out;
  while (s.Step()) out.push_back(RowToRecord(s));
  return out;
}

std::size_t AnnotationStore::CountRatings(RatingStatus status) const {
  std::lock_guard lock(mu_);
  Stmt s(db_->handle, "SELECT COUNT(*) FROM ratings WHERE status = ?");
  s.Bind(1, StatusName(status));
  s.Step();
  return static_cast<std::size_t>(s.Int(0));
}

void AnnotationStore::Export(const std::filesystem::path& path) const {
  WriteExport(path, FinalRatings());
}

}  // namespace emoint::annostore
