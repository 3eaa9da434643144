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

#ifndef EMOINT_LLMRUN_CLIENT_H_
#define EMOINT_LLMRUN_CLIENT_H_

#include <chrono>
#include <cstdint>
#include <functional>
#include <mutex>
#include <string>

namespace emoint::llmrun {

struct ChatRequest {
  std::string model;
  std::string prompt;
  double temperature = 0.0;
};

struct ChatReply {
  std::string content;
  std::int64_t tokens_in = 0;
  std::int64_t tokens_out = 0;
};

class ChatClient {
 public:
  virtual ~ChatClient() = default;
  // Throws kTransportError for anything worth retrying.
  virtual ChatReply Complete(const ChatRequest& request) = 0;
};

struct HttpChatOptions {
  std::string url;
  std::string api_key;
  int timeout_seconds = 120;
};

// POST {model, messages: [{role: "user", content}], temperature};
// reads choices[0].message.content and usage.{prompt,completion}_tokens.
class HttpChatClient : public ChatClient {
 public:
  explicit HttpChatClient(HttpChatOptions options);
  ChatReply Complete(const ChatRequest& request) override;

 private:
  HttpChatOptions options_;
};

using Sleeper = std::function<void(std::chrono::milliseconds)>;
void RealSleep(std::chrono::milliseconds d);

struct RetryPolicy {
  int max_attempts = 5;
  std::chrono::milliseconds base_delay{500};
  std::chrono::milliseconds max_delay{30000};
  double multiplier = 2.0;

  // Delay before attempt `attempt` + 1, given `attempt` >= 1 failures.
  std::chrono::milliseconds DelayAfter(int attempt) const;
};

struct RetryResult {
  bool ok = false;
  ChatReply reply;
  int attempts = 0;
  std::string last_error;
};

// Retries kTransportError failures with exponential backoff. Other errors
// propagate.
RetryResult CompleteWithRetry(ChatClient& client, const ChatRequest& request,
                              const RetryPolicy& policy, const Sleeper& sleep);

// Token bucket refilled at `per_minute` / 60 tokens per second with room
// for `burst` tokens. A rate of 0 disables limiting.
class RateLimiter {
 public:
  using Clock = std::chrono::steady_clock;

  explicit RateLimiter(double per_minute, double burst = 1.0);
  void Acquire();

 private:
  double rate_per_second_;
  double capacity_;
  double tokens_;
  Clock::time_point last_;
  std::mutex mu_;
};

}  // namespace emoint::llmrun

#endif  // EMOINT_LLMRUN_CLIENT_H_
