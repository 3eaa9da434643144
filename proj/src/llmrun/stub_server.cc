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

#include "emoint/llmrun/stub_server.h"

#include <sstream>

#include <fmt/core.h>

#include "emoint/common/error.h"
#include "emoint/common/hash.h"
#include "emoint/common/rng.h"
#include "httplib.h"
#include "json.hpp"

namespace emoint::llmrun {
namespace {

std::int64_t WordCount(const std::string& s) {
  std::istringstream in(s);
  std::string w;
  std::int64_t n = 0;
  while (in >> w) ++n;
  return n;
}

// The text after the last block opener, so the hash ignores exemplars.
std::string TargetPart(const std::string& prompt) {
  const std::size_t last = prompt.rfind("\"\"\"");
  if (last == std::string::npos || last == 0) return prompt;
  const std::size_t prev = prompt.rfind("\"\"\"", last - 1);
  if (prev == std::string::npos) return prompt;
  return prompt.substr(prev, last - prev);
}

}  // namespace

StubOptions::Mode ParseStubMode(const std::string& name) {
  if (name == "fixed") return StubOptions::Mode::kFixed;
  if (name == "rules") return StubOptions::Mode::kRules;
  if (name == "hash") return StubOptions::Mode::kHash;
  throw Error(ErrorCode::kConfigError,
              fmt::format("unknown stub mode '{}'", name));
}

StubChatServer::StubChatServer(StubOptions options)
    : options_(std::move(options)),
      http_(std::make_unique<httplib::Server>()) {
  remaining_failures_ = options_.fail_first;
  Routes();
}

StubChatServer::~StubChatServer() { Stop(); }

std::string StubChatServer::ReplyFor(const std::string& prompt) const {
  switch (options_.mode) {
    case StubOptions::Mode::kFixed:
      return options_.reply;
    case StubOptions::Mode::kRules:
      for (const auto& [needle, reply] : options_.rules) {
        if (prompt.find(needle) != std::string::npos) return reply;
      }
      return options_.reply;
    case StubOptions::Mode::kHash:
      return std::to_string(1 + Fnv1a64(TargetPart(prompt)) % 5);
  }
  return options_.reply;
}

void StubChatServer::Routes() {
  http_->Post("/v1/chat/completions", [this](const httplib::Request& req,
                                             httplib::Response& res) {
    if (remaining_failures_.fetch_sub(1) > 0) {
      ++failures_;
      res.status = 503;
      res.set_content(R"({"error":"injected failure"})", "application/json");
      return;
    }
    const auto body = nlohmann::json::parse(req.body, nullptr, false);
    if (body.is_discarded() || !body.contains("messages") ||
        body["messages"].empty()) {
      res.status = 400;
      res.set_content(R"({"error":"bad request"})", "application/json");
      return;
    }
    const std::string prompt =
        body["messages"].back().value("content", std::string());
    const std::string reply = ReplyFor(prompt);
    {
      std::lock_guard lock(mu_);
      ++prompt_counts_[prompt];
    }
    ++queries_;
    const nlohmann::json out = {
        {"choices",
         {{{"index", 0},
           {"message", {{"role", "assistant"}, {"content", reply}}}}}},
        {"usage",
         {{"prompt_tokens", WordCount(prompt)},
          {"completion_tokens", WordCount(reply)}}},
    };
    res.set_content(out.dump(), "application/json");
  });

  http_->Post("/v1/embeddings", [this](const httplib::Request& req,
                                       httplib::Response& res) {
    const auto body = nlohmann::json::parse(req.body, nullptr, false);
    if (body.is_discarded() || !body.contains("input")) {
      res.status = 400;
      return;
    }
    nlohmann::json data = nlohmann::json::array();
    int index = 0;
    for (const auto& text : body["input"]) {
      Rng rng(Fnv1a64(text.get<std::string>()));
      std::vector<double> v(options_.embedding_dim);
      for (double& x : v) x = rng.Normal(0.5, 1.0);
      data.push_back({{"index", index++}, {"embedding", v}});
    }
    res.set_content(nlohmann::json{{"data", data}}.dump(), "application/json");
  });
}

int StubChatServer::Start() {
  if (options_.port == 0) {
    port_ = http_->bind_to_any_port(options_.host);
  } else {
    port_ = http_->bind_to_port(options_.host, options_.port) ? options_.port
                                                              : -1;
  }
  if (port_ < 0) {
    throw Error(ErrorCode::kIoError,
                fmt::format("stub cannot bind {}:{}", options_.host,
                            options_.port));
  }
  thread_ = std::thread([this] { http_->listen_after_bind(); });
  http_->wait_until_ready();
  return port_;
}

void StubChatServer::Run() {
  port_ = options_.port;
  if (!http_->listen(options_.host, options_.port)) {
    throw Error(ErrorCode::kIoError,
                fmt::format("stub cannot listen on {}:{}", options_.host,
                            options_.port));
  }
}

void StubChatServer::Stop() {
  if (http_) http_->stop();
  if (thread_.joinable()) thread_.join();
}

std::string StubChatServer::ChatUrl() const {
  return fmt::format("http://{}:{}/v1/chat/completions", options_.host, port_);
}

std::string StubChatServer::EmbeddingUrl() const {
  return fmt::format("http://{}:{}/v1/embeddings", options_.host, port_);
}

std::map<std::string, int> StubChatServer::PromptCounts() const {
  std::lock_guard lock(mu_);
  return prompt_counts_;
}

}  // namespace emoint::llmrun
