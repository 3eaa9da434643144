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

#include "emoint/annostore/server.h"

#include <random>

#include <fmt/core.h>

#include "emoint/common/error.h"
#include "emoint/common/files.h"
#include "httplib.h"
#include "json.hpp"

namespace emoint::annostore {
namespace {

using nlohmann::json;

int HttpStatusFor(ErrorCode code) {
  switch (code) {
    case ErrorCode::kNotAssigned:
      return 403;
    case ErrorCode::kScaleViolation:
      return 422;
    case ErrorCode::kAlreadyFinal:
      return 409;
    case ErrorCode::kUnknownAnnotator:
      return 404;
    case ErrorCode::kParseError:
    case ErrorCode::kInvalidArgument:
      return 400;
    default:
      return 500;
  }
}

void SendJson(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void SendError(httplib::Response& res, int status, std::string_view code,
               std::string_view message) {
  SendJson(res, status, {{"error", code}, {"message", message}});
}

json ProgressJson(const SetProgress& p) {
  return {{"set_id", p.set_id}, {"done", p.done}, {"total", p.total}};
}

json NextJson(const NextText& n) {
  json j = {{"set_id", n.set_id},
            {"text_id", nullptr},
            {"clean_text", n.clean_text},
            {"position", n.position},
            {"total", n.total}};
  if (n.text_id) j["text_id"] = *n.text_id;
  if (n.draft) j["draft"] = LabelsToJson(*n.draft);
  return j;
}

json ParseBody(const httplib::Request& req) {
  json body = json::parse(req.body, nullptr, /*allow_exceptions=*/false);
  if (body.is_discarded() || !body.is_object()) {
    throw Error(ErrorCode::kParseError, "request body must be a JSON object");
  }
  return body;
}

std::string RequireString(const json& body, const char* key) {
  const auto it = body.find(key);
  if (it == body.end() || !it->is_string()) {
    throw Error(ErrorCode::kParseError,
                fmt::format("missing string field '{}'", key));
  }
  return it->get<std::string>();
}

std::string NewSessionId() {
  static thread_local std::random_device device;
  std::string out;
  for (int i = 0; i < 4; ++i) {
    const std::uint64_t hi = device();
    const std::uint64_t lo = device();
    out += fmt::format("{:016x}", (hi << 32) | lo);
  }
  return out;
}

}  // namespace

AnnotationServer::AnnotationServer(AnnotationStore& store,
                                   ServerOptions options)
    : store_(store),
      options_(std::move(options)),
      http_(std::make_unique<httplib::Server>()) {
  Routes();
}

AnnotationServer::~AnnotationServer() { Stop(); }

std::optional<std::string> AnnotationServer::Authenticate(
    const std::string& header) const {
  constexpr std::string_view kPrefix = "Bearer ";
  if (header.size() <= kPrefix.size() ||
      header.compare(0, kPrefix.size(), kPrefix) != 0) {
    return std::nullopt;
  }
  std::lock_guard lock(sessions_mu_);
  const auto it = sessions_.find(header.substr(kPrefix.size()));
  if (it == sessions_.end()) return std::nullopt;
  return it->second;
}

void AnnotationServer::Routes() {
  httplib::Server& http = *http_;

  // Wraps a handler that needs an authenticated annotator.
  auto authed = [this](auto handler) {
    return [this, handler](const httplib::Request& req,
                           httplib::Response& res) {
      const auto who = Authenticate(req.get_header_value("Authorization"));
      if (!who) {
        SendError(res, 401, "unauthorized", "missing or unknown session");
        return;
      }
      try {
        handler(*who, req, res);
      } catch (const Error& e) {
        SendError(res, HttpStatusFor(e.code()), ErrorCodeName(e.code()),
                  e.what());
      }
    };
  };

  http.Post("/api/session", [this](const httplib::Request& req,
                                   httplib::Response& res) {
    try {
      const json body = ParseBody(req);
      const std::string who = RequireString(body, "annotator_id");
      const std::string token = RequireString(body, "token");
      if (!store_.CheckToken(who, token)) {
        SendError(res, 401, "unauthorized", "bad annotator id or token");
        return;
      }
      const std::string session = NewSessionId();
      {
        std::lock_guard lock(sessions_mu_);
        sessions_[session] = who;
      }
      SendJson(res, 200, {{"session", session}});
    } catch (const Error& e) {
      SendError(res, HttpStatusFor(e.code()), ErrorCodeName(e.code()),
                e.what());
    }
  });

  http.Get("/api/assignments",
           authed([this](const std::string& who, const httplib::Request&,
                         httplib::Response& res) {
             json sets = json::array();
             for (const SetProgress& p : store_.Progress(who)) {
               sets.push_back(ProgressJson(p));
             }
             SendJson(res, 200, {{"sets", sets}});
           }));

  http.Get(R"(/api/sets/([^/]+)/next)",
           authed([this](const std::string& who, const httplib::Request& req,
                         httplib::Response& res) {
             SendJson(res, 200, NextJson(store_.Next(who, req.matches[1])));
           }));

  http.Post("/api/ratings",
            authed([this](const std::string& who, const httplib::Request& req,
                          httplib::Response& res) {
              const json body = ParseBody(req);
              RatingRecord record;
              record.annotator_id = who;
              record.text_id = RequireString(body, "text_id");
              if (body.contains("set_id")) {
                record.set_id = RequireString(body, "set_id");
              }
              if (!body.contains("labels")) {
                throw Error(ErrorCode::kParseError, "missing 'labels'");
              }
              record.labels = LabelsFromJson(body["labels"]);
              const auto final_it = body.find("final");
              if (final_it != body.end() && !final_it->is_boolean()) {
                throw Error(ErrorCode::kParseError, "'final' must be boolean");
              }
              record.status = final_it != body.end() && final_it->get<bool>()
                                  ? RatingStatus::kFinal
                                  : RatingStatus::kDraft;
              const SubmitAck ack = store_.Submit(std::move(record));
              SendJson(res, 200,
                       {{"status", ack.status == RatingStatus::kFinal
                                       ? "final"
                                       : "draft"},
                        {"progress", ProgressJson(ack.progress)}});
            }));

  http.Post("/api/postpone",
            authed([this](const std::string& who, const httplib::Request& req,
                          httplib::Response& res) {
              const json body = ParseBody(req);
              const std::string set_id = RequireString(body, "set_id");
              store_.Postpone(who, set_id);
              SendJson(res, 200, {{"postponed", set_id}});
            }));

  http.Get("/api/resume",
           authed([this](const std::string& who, const httplib::Request&,
                         httplib::Response& res) {
             const ResumeState state = store_.Resume(who);
             json pending = json::array();
             for (const SetProgress& p : state.pending) {
               pending.push_back(ProgressJson(p));
             }
             json body = {{"pending", pending}, {"current", nullptr}};
             if (state.current) body["current"] = NextJson(*state.current);
             SendJson(res, 200, body);
           }));

  http.Get("/docs/instructions", [this](const httplib::Request&,
                                        httplib::Response& res) {
    if (!options_.instructions) {
      SendError(res, 404, "not_found", "no instructions configured");
      return;
    }
    try {
      res.set_content(ReadFile(*options_.instructions),
                      "text/markdown; charset=utf-8");
    } catch (const Error& e) {
      SendError(res, 500, ErrorCodeName(e.code()), e.what());
    }
  });

  if (options_.static_dir) {
    http.set_mount_point("/", options_.static_dir->string());
  }
}

int AnnotationServer::Start() {
  int port = options_.port;
  if (port == 0) {
    port = http_->bind_to_any_port(options_.host);
  } else if (!http_->bind_to_port(options_.host, port)) {
    port = -1;
  }
  if (port < 0) {
    throw Error(ErrorCode::kIoError,
                fmt::format("cannot bind {}:{}", options_.host,
                            options_.port));
  }
  thread_ = std::thread([this] { http_->listen_after_bind(); });
  http_->wait_until_ready();
  return port;
}

void AnnotationServer::Run() {
  if (!http_->listen(options_.host, options_.port)) {
    throw Error(ErrorCode::kIoError,
                fmt::format("cannot listen on {}:{}", options_.host,
                            options_.port));
  }
}

void AnnotationServer::Stop() {
  if (http_) http_->stop();
  if (thread_.joinable()) thread_.join();
}

}  // namespace emoint::annostore
