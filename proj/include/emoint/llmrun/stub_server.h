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

#ifndef EMOINT_LLMRUN_STUB_SERVER_H_
#define EMOINT_LLMRUN_STUB_SERVER_H_

#include <atomic>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <thread>
#include <utility>
#include <vector>

namespace httplib {
class Server;
}

namespace emoint::llmrun {

// Offline stand-in for chat-completion and embedding endpoints.
struct StubOptions {
  enum class Mode { kFixed, kRules, kHash };
  Mode mode = Mode::kFixed;
  // Reply for kFixed, fallback for kRules.
  std::string reply = "3";
  // First rule whose needle occurs in the prompt wins.
  std::vector<std::pair<std::string, std::string>> rules;
  // The first n chat requests fail with HTTP 503.
  int fail_first = 0;
  std::size_t embedding_dim = 16;
  std::string host = "127.0.0.1";
  int port = 0;
};

StubOptions::Mode ParseStubMode(const std::string& name);

// Serves POST /v1/chat/completions and POST /v1/embeddings.
class StubChatServer {
 public:
  explicit StubChatServer(StubOptions options);
  ~StubChatServer();
  StubChatServer(const StubChatServer&) = delete;
  StubChatServer& operator=(const StubChatServer&) = delete;

  // Background thread; returns the bound port.
  int Start();
  // Blocks until Stop().
  void Run();
  void Stop();

  std::string ChatUrl() const;
  std::string EmbeddingUrl() const;

  // Successful chat replies served, excluding injected failures.
  std::size_t queries() const { return queries_.load(); }
  std::size_t failures() const { return failures_.load(); }
  // Prompt -> times answered.
  std::map<std::string, int> PromptCounts() const;

  // Reply the stub gives for a prompt.
  std::string ReplyFor(const std::string& prompt) const;

 private:
  void Routes();

  StubOptions options_;
  std::unique_ptr<httplib::Server> http_;
  std::thread thread_;
  int port_ = 0;
  std::atomic<std::size_t> queries_{0};
  std::atomic<std::size_t> failures_{0};
  std::atomic<int> remaining_failures_{0};
  std::map<std::string, int> prompt_counts_;
  mutable std::mutex mu_;
};

}  // namespace emoint::llmrun

#endif  // EMOINT_LLMRUN_STUB_SERVER_H_
