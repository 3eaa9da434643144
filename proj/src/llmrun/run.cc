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

#include "emoint/llmrun/run.h"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <fstream>
#include <mutex>
#include <set>
#include <thread>

#include <fmt/core.h>

#include "emoint/common/csv.h"
#include "emoint/common/error.h"
#include "emoint/common/files.h"

namespace emoint::llmrun {
namespace {

using Key = std::pair<Metric, std::string>;

std::string NowIso() {
  const std::time_t now =
      std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

double CostOf(const LlmOutcome& o, const Price& p) {
  return static_cast<double>(o.tokens_in) * p.input_per_million / 1e6 +
         static_cast<double>(o.tokens_out) * p.output_per_million / 1e6;
}

// Cuts an unterminated final line left by an interrupted write.
void DropPartialTail(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) return;
  const std::string content = ReadFile(path);
  if (content.empty() || content.back() == '\n') return;
  const std::size_t keep = content.rfind('\n');
  std::filesystem::resize_file(path, keep == std::string::npos ? 0 : keep + 1);
}

// Serializes appends; every line is flushed so a killed run loses at most
// the line being written.
class Appender {
 public:
  explicit Appender(const std::filesystem::path& path) {
    DropPartialTail(path);
    out_.open(path, std::ios::app | std::ios::binary);
    if (!out_) {
      throw Error(ErrorCode::kIoError,
                  fmt::format("cannot append to '{}'", path.string()));
    }
  }
  void Write(const LlmOutcome& o) {
    std::lock_guard lock(mu_);
    out_ << OutcomeToJson(o).dump() << '\n';
    out_.flush();
  }

 private:
  std::ofstream out_;
  std::mutex mu_;
};

}  // namespace

std::string_view OutcomeStatusName(OutcomeStatus status) {
  switch (status) {
    case OutcomeStatus::kOk: return "ok";
    case OutcomeStatus::kRejected: return "rejected";
    case OutcomeStatus::kTransportError: return "transport_error";
  }
  return "";
}

OutcomeStatus ParseOutcomeStatus(std::string_view name) {
  for (OutcomeStatus s : {OutcomeStatus::kOk, OutcomeStatus::kRejected,
                          OutcomeStatus::kTransportError}) {
    if (OutcomeStatusName(s) == name) return s;
  }
  throw Error(ErrorCode::kParseError,
              fmt::format("unknown outcome status '{}'", name));
}

nlohmann::json OutcomeToJson(const LlmOutcome& o) {
  nlohmann::json j = {
      {"text_id", o.text_id},
      {"metric", MetricKey(o.metric)},
      {"model", o.model},
      {"raw_reply", o.raw_reply},
      {"parsed", nullptr},
      {"status", OutcomeStatusName(o.status)},
      {"tokens_in", o.tokens_in},
      {"tokens_out", o.tokens_out},
      {"cost_estimate", o.cost_estimate},
      {"attempts", o.attempts},
  };
  if (o.parsed) j["parsed"] = *o.parsed;
  if (o.reason != RejectReason::kNone) j["reason"] = RejectReasonName(o.reason);
  if (!o.error.empty()) j["error"] = o.error;
  return j;
}

LlmOutcome OutcomeFromJson(const nlohmann::json& j) {
  try {
    LlmOutcome o;
    o.text_id = j.at("text_id").get<std::string>();
    o.metric = MetricFromKey(j.at("metric").get<std::string>());
    o.model = j.value("model", "");
    o.raw_reply = j.value("raw_reply", "");
    if (j.contains("parsed") && !j["parsed"].is_null()) {
      o.parsed = j["parsed"].get<int>();
    }
    o.status = ParseOutcomeStatus(j.at("status").get<std::string>());
    o.reason = ParseRejectReason(j.value("reason", ""));
    o.tokens_in = j.value("tokens_in", std::int64_t{0});
    o.tokens_out = j.value("tokens_out", std::int64_t{0});
    o.cost_estimate = j.value("cost_estimate", 0.0);
    o.attempts = j.value("attempts", 0);
    o.error = j.value("error", "");
    if ((o.status == OutcomeStatus::kOk) != o.parsed.has_value()) {
      throw Error(ErrorCode::kParseError,
                  fmt::format("outcome for '{}' has inconsistent status",
                              o.text_id));
    }
    return o;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParseError,
                fmt::format("bad outcome record: {}", e.what()));
  }
}

PriceTable PriceTableFromJson(const nlohmann::json& j) {
  PriceTable table;
  try {
    for (const auto& [model, p] : j.items()) {
      table[model] = {p.at("input_per_million").get<double>(),
                      p.at("output_per_million").get<double>()};
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kConfigError,
                fmt::format("bad price table: {}", e.what()));
  }
  return table;
}

CostReport EstimateCost(const std::vector<LlmOutcome>& outcomes,
                        const PriceTable& prices) {
  CostReport report;
  for (const LlmOutcome& o : outcomes) {
    const auto it = prices.find(o.model);
    if (it == prices.end()) {
      throw Error(ErrorCode::kUnknownModel,
                  fmt::format("no price for model '{}'", o.model));
    }
    const double c = CostOf(o, it->second);
    report.total += c;
    report.per_model[o.model] += c;
  }
  return report;
}

std::filesystem::path RunDir(const RunOptions& options) {
  return options.runs_dir / options.run_id;
}

std::vector<LlmOutcome> LoadOutcomes(const std::filesystem::path& path) {
  std::map<Key, LlmOutcome> latest;
  if (std::filesystem::exists(path)) {
    for (const auto& j : ReadJsonLines(path)) {
      LlmOutcome o = OutcomeFromJson(j);
      Key key{o.metric, o.text_id};
      latest[key] = std::move(o);
    }
  }
  std::vector<LlmOutcome> out;
  out.reserve(latest.size());
  for (auto& [key, o] : latest) out.push_back(std::move(o));
  return out;
}

RunResult RunAnnotation(const std::vector<LlmTask>& tasks, ChatClient& client,
                        const RunOptions& options) {
  if (options.run_id.empty() || options.model.empty()) {
    throw Error(ErrorCode::kConfigError, "run id and model are required");
  }
  const auto started = std::chrono::steady_clock::now();
  const std::string started_at = NowIso();
  const std::filesystem::path dir = RunDir(options);
  std::filesystem::create_directories(dir);
  const std::filesystem::path log = dir / "outcomes.jsonl";
  if (!options.resume && std::filesystem::exists(log)) {
    std::filesystem::remove(log);
  }

  std::set<Key> wanted;
  for (const LlmTask& t : tasks) {
    if (t.prompt.empty()) {
      throw Error(ErrorCode::kConfigError,
                  fmt::format("empty prompt for '{}'", t.text_id));
    }
    if (!wanted.insert({t.metric, t.text_id}).second) {
      throw Error(ErrorCode::kConfigError,
                  fmt::format("duplicate task {}/{}", MetricKey(t.metric),
                              t.text_id));
    }
  }

  std::map<Key, LlmOutcome> settled;
  for (LlmOutcome& o : LoadOutcomes(log)) {
    Key key{o.metric, o.text_id};
    if (wanted.count(key) && o.status != OutcomeStatus::kTransportError) {
      settled.emplace(std::move(key), std::move(o));
    }
  }
  RunResult result;
  result.reused = settled.size();

  std::vector<const LlmTask*> pending;
  for (const LlmTask& t : tasks) {
    if (!settled.count({t.metric, t.text_id})) pending.push_back(&t);
  }
  if (options.query_budget && pending.size() > *options.query_budget) {
    pending.resize(*options.query_budget);
  }

  Appender appender(log);
  RateLimiter limiter(options.requests_per_minute,
                      std::max<double>(1.0, static_cast<double>(
                                                options.parallelism)));
  std::mutex results_mu;
  std::atomic<std::size_t> next{0};
  std::exception_ptr fatal;
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= pending.size()) return;
      {
        std::lock_guard lock(results_mu);
        if (fatal) return;
      }
      const LlmTask& task = *pending[i];
      LlmOutcome o;
      o.text_id = task.text_id;
      o.metric = task.metric;
      o.model = options.model;
      try {
        limiter.Acquire();
        const RetryResult r = CompleteWithRetry(
            client, {options.model, task.prompt, options.temperature},
            options.retry, options.sleep);
        o.attempts = r.attempts;
        if (r.ok) {
          o.raw_reply = r.reply.content;
          o.tokens_in = r.reply.tokens_in;
          o.tokens_out = r.reply.tokens_out;
          const ParsedScore p = ParseScore(o.raw_reply);
          o.parsed = p.score;
          o.reason = p.reason;
          o.status = p.ok() ? OutcomeStatus::kOk : OutcomeStatus::kRejected;
        } else {
          o.status = OutcomeStatus::kTransportError;
          o.error = r.last_error;
        }
        if (options.prices) {
          const auto it = options.prices->find(options.model);
          if (it != options.prices->end()) o.cost_estimate = CostOf(o, it->second);
        }
        appender.Write(o);
      } catch (...) {
        std::lock_guard lock(results_mu);
        if (!fatal) fatal = std::current_exception();
        return;
      }
      std::lock_guard lock(results_mu);
      settled[{o.metric, o.text_id}] = std::move(o);
      ++result.queried;
    }
  };
  const std::size_t n_threads =
      std::max<std::size_t>(1, std::min(options.parallelism, pending.size()));
  std::vector<std::thread> threads;
  for (std::size_t t = 0; t < n_threads; ++t) threads.emplace_back(worker);
  for (auto& th : threads) th.join();
  if (fatal) std::rethrow_exception(fatal);

  std::map<std::string, std::size_t> rejected_by_metric;
  std::size_t ok = 0, rejected = 0, transport = 0;
  double cost = 0.0;
  for (auto& [key, o] : settled) {
    switch (o.status) {
      case OutcomeStatus::kOk: ++ok; break;
      case OutcomeStatus::kRejected:
        ++rejected;
        ++rejected_by_metric[std::string(MetricKey(o.metric))];
        break;
      case OutcomeStatus::kTransportError: ++transport; break;
    }
    cost += o.cost_estimate;
    result.outcomes.push_back(o);
  }
  result.complete = settled.size() == wanted.size();
  for (Metric m : kAllMetrics) {
    rejected_by_metric.emplace(std::string(MetricKey(m)), 0);
  }
  const double seconds = std::chrono::duration<double>(
                             std::chrono::steady_clock::now() - started)
                             .count();
  result.manifest = {
      {"run_id", options.run_id},
      {"model", options.model},
      {"temperature", options.temperature},
      {"max_attempts", options.retry.max_attempts},
      {"shots", {{"basic", options.shots_basic},
                 {"dimensional", options.shots_dimensional}}},
      {"pairs", wanted.size()},
      {"complete", result.complete},
      {"queried_this_run", result.queried},
      {"reused", result.reused},
      {"ok", ok},
      {"rejected", rejected},
      {"transport_error", transport},
      {"rejected_by_metric", rejected_by_metric},
      {"cost_total", cost},
      {"started_at", started_at},
      {"finished_at", NowIso()},
      {"seconds", seconds},
  };
  WriteJson(dir / "manifest.json", result.manifest);
  return result;
}

void WriteOutcomesCsv(const std::filesystem::path& path,
                      const std::string& run_id,
                      const std::vector<LlmOutcome>& outcomes) {
  csv::Table table;
  table.header = {"run_id",  "metric",    "text_id",   "status",
                  "parsed",  "tokens_in", "tokens_out"};
  for (const LlmOutcome& o : outcomes) {
    table.rows.push_back({run_id, std::string(MetricKey(o.metric)), o.text_id,
                          std::string(OutcomeStatusName(o.status)),
                          o.parsed ? std::to_string(*o.parsed) : "",
                          std::to_string(o.tokens_in),
                          std::to_string(o.tokens_out)});
  }
  csv::Write(path, table);
}

}  // namespace emoint::llmrun
