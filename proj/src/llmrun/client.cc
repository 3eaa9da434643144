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

#include "emoint/llmrun/client.h"

#include <algorithm>
#include <cmath>
#include <thread>

#include <fmt/core.h>

#include "emoint/common/error.h"
#include "emoint/common/url.h"
#include "httplib.h"
#include "json.hpp"

namespace emoint::llmrun {

HttpChatClient::HttpChatClient(HttpChatOptions options)
    : options_(std::move(options)) {
  SplitUrl(options_.url);
}

ChatReply HttpChatClient::Complete(const ChatRequest& request) {
  const UrlParts url = SplitUrl(options_.url);
  httplib::Client client(url.base);
  client.set_connection_timeout(options_.timeout_seconds);
  client.set_read_timeout(options_.timeout_seconds);
  httplib::Headers headers;
  if (!options_.api_key.empty()) {
    headers.emplace("Authorization", "Bearer " + options_.api_key);
  }
  const nlohmann::json body = {
      {"model", request.model},
      {"messages", {{{"role", "user"}, {"content", request.prompt}}}},
      {"temperature", request.temperature},
  };
  auto res = client.Post(url.path, headers, body.dump(), "application/json");
  if (!res) {
    throw Error(ErrorCode::kTransportError,
                fmt::format("chat request failed: {}",
                            httplib::to_string(res.error())));
  }
  if (res->status != 200) {
    throw Error(ErrorCode::kTransportError,
                fmt::format("chat endpoint returned HTTP {}", res->status));
  }
  try {
    const auto j = nlohmann::json::parse(res->body);
    ChatReply reply;
    const auto& content = j.at("choices").at(0).at("message").at("content");
    reply.content = content.is_string() ? content.get<std::string>() : "";
    if (j.contains("usage") && j["usage"].is_object()) {
      reply.tokens_in = j["usage"].value("prompt_tokens", 0);
      reply.tokens_out = j["usage"].value("completion_tokens", 0);
    }
    return reply;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kTransportError,
                fmt::format("malformed chat reply: {}", e.what()));
  }
}

void RealSleep(std::chrono::milliseconds d) { std::this_thread::sleep_for(d); }

std::chrono::milliseconds RetryPolicy::DelayAfter(int attempt) const {
  const double ms = static_cast<double>(base_delay.count()) *
                    std::pow(multiplier, std::max(0, attempt - 1));
  return std::chrono::milliseconds(static_cast<long long>(
      std::min(ms, static_cast<double>(max_delay.count()))));
}

RetryResult CompleteWithRetry(ChatClient& client, const ChatRequest& request,
                              const RetryPolicy& policy, const Sleeper& sleep) {
  RetryResult result;
  const int attempts = std::max(1, policy.max_attempts);
  for (int attempt = 1; attempt <= attempts; ++attempt) {
    result.attempts = attempt;
    try {
      result.reply = client.Complete(request);
      result.ok = true;
      return result;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kTransportError) throw;
      result.last_error = e.what();
    }
    if (attempt < attempts) sleep(policy.DelayAfter(attempt));
  }
  return result;
}

RateLimiter::RateLimiter(double per_minute, double burst)
    : rate_per_second_(per_minute / 60.0),
      capacity_(std::max(1.0, burst)),
      tokens_(std::max(1.0, burst)),
      last_(Clock::now()) {}

void RateLimiter::Acquire() {
  if (rate_per_second_ <= 0.0) return;
  std::unique_lock lock(mu_);
  for (;;) {
    const auto now = Clock::now();
    const double elapsed =
        std::chrono::duration<double>(now - last_).count();
    last_ = now;
    tokens_ = std::min(capacity_, tokens_ + elapsed * rate_per_second_);
    if (tokens_ >= 1.0) {
      tokens_ -= 1.0;
      return;
    }
    const double wait = (1.0 - tokens_) / rate_per_second_;
    // Holding the lock keeps waiters in arrival order.
    std::this_thread::sleep_for(std::chrono::duration<double>(wait));
  }
}

}  // namespace emoint::llmrun
