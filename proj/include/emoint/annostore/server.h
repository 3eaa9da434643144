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

#ifndef EMOINT_ANNOSTORE_SERVER_H_
#define EMOINT_ANNOSTORE_SERVER_H_

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>

#include "emoint/annostore/store.h"

namespace httplib {
class Server;
}

namespace emoint::annostore {

struct ServerOptions {
  std::string host = "127.0.0.1";
  // 0 binds an ephemeral port.
  int port = 8080;
  // Static UI bundle mounted at "/", when set.
  std::optional<std::filesystem::path> static_dir;
  // Annotator instructions served verbatim at /docs/instructions.
  std::optional<std::filesystem::path> instructions;
};

// JSON API consumed by the annotation UI:
//   POST /api/session {annotator_id, token} -> {session}
//   GET  /api/assignments -> {sets: [{set_id, done, total}]}
//   GET  /api/sets/{set_id}/next -> {text_id, clean_text, position, ...}
//   POST /api/ratings {text_id, set_id, labels, final} -> progress ack
//   POST /api/postpone {set_id}
//   GET  /api/resume -> {pending, current}
// Authenticated calls carry "Authorization: Bearer <session>". Errors are
// {"error": {"code", "message"}}.
class AnnotationServer {
 public:
  AnnotationServer(AnnotationStore& store, ServerOptions options);
  ~AnnotationServer();
  AnnotationServer(const AnnotationServer&) = delete;
  AnnotationServer& operator=(const AnnotationServer&) = delete;

  // Binds and serves on a background thread; returns the bound port.
  int Start();
  // Binds and serves on the calling thread until Stop().
  void Run();
  void Stop();

 private:
  void Routes();
  std::optional<std::string> Authenticate(const std::string& header) const;

  AnnotationStore& store_;
  ServerOptions options_;
  std::unique_ptr<httplib::Server> http_;
  std::thread thread_;
  std::map<std::string, std::string> sessions_;
  mutable std::mutex sessions_mu_;
};

}  // namespace emoint::annostore

#endif  // EMOINT_ANNOSTORE_SERVER_H_
