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

// Local deterministic stand-in for a chat-completion and embeddings service.

#include <atomic>
#include <chrono>
#include <csignal>
#include <iostream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "emoint/common/error.h"
#include "emoint/llmrun/stub_server.h"

namespace {

std::atomic<bool> g_stop{false};

void HandleSignal(int) { g_stop = true; }

int Run(int argc, char** argv) {
  CLI::App app{"Deterministic stub for chat-completion and embedding calls",
               "emoint-stub-llm"};
  emoint::llmrun::StubOptions opts;
  std::string mode = "hash";
  std::vector<std::string> rules;
  app.add_option("--host", opts.host, "Bind address");
  app.add_option("--port", opts.port, "Listen port; 0 picks a free one");
  app.add_option("--mode", mode, "fixed, rules or hash")
      ->check(CLI::IsMember({"fixed", "rules", "hash"}));
  app.add_option("--reply", opts.reply, "Reply in fixed mode, and the default");
  app.add_option("--rule", rules,
                 "NEEDLE=REPLY; the first rule whose needle occurs wins");
  app.add_option("--fail-first", opts.fail_first,
                 "Answer the first N chat calls with 503");
  app.add_option("--embedding-dim", opts.embedding_dim,
                 "Length of returned embedding vectors");
  CLI11_PARSE(app, argc, argv);

  try {
    opts.mode = emoint::llmrun::ParseStubMode(mode);
    for (const std::string& r : rules) {
      const auto eq = r.find('=');
      if (eq == std::string::npos || eq == 0) {
        throw emoint::Error(emoint::ErrorCode::kConfigError,
                            "--rule expects NEEDLE=REPLY, got '" + r + "'");
      }
      opts.rules.emplace_back(r.substr(0, eq), r.substr(eq + 1));
    }
    emoint::llmrun::StubChatServer server(opts);
    const int port = server.Start();
    std::signal(SIGINT, HandleSignal);
    std::signal(SIGTERM, HandleSignal);
    std::cout << nlohmann::json{{"port", port},
                                {"chat_url", server.ChatUrl()},
                                {"embedding_url", server.EmbeddingUrl()}}
                     .dump()
              << std::endl;
    while (!g_stop) std::this_thread::sleep_for(std::chrono::milliseconds(100));
    server.Stop();
    std::cerr << nlohmann::json{{"queries", server.queries()},
                                {"failures", server.failures()}}
                     .dump()
              << "\n";
    return 0;
  } catch (const emoint::Error& e) {
    std::cerr << nlohmann::json{{"error", emoint::ErrorCodeName(e.code())},
                                {"message", e.what()}}
                     .dump()
              << "\n";
    return e.code() == emoint::ErrorCode::kConfigError ? 2 : 1;
  }
}

}  // namespace

int main(int argc, char** argv) { return Run(argc, argv); }
