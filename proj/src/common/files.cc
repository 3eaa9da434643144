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

#include "emoint/common/files.h"

#include <fstream>
#include <sstream>

#include <fmt/core.h>

#include "emoint/common/error.h"

namespace emoint {

namespace fs = std::filesystem;

std::string ReadFile(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorCode::kIoError,
                fmt::format("cannot open {}", path.string()));
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void WriteFile(const fs::path& path, std::string_view content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) {
      throw Error(ErrorCode::kIoError,
                  fmt::format("cannot write {}", tmp.string()));
    }
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) {
      throw Error(ErrorCode::kIoError,
                  fmt::format("short write to {}", tmp.string()));
    }
  }
  fs::rename(tmp, path);
}

nlohmann::json ReadJson(const fs::path& path) {
  try {
    return nlohmann::json::parse(ReadFile(path));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParseError,
                fmt::format("{}: {}", path.string(), e.what()));
  }
}

void WriteJson(const fs::path& path, const nlohmann::json& value) {
  WriteFile(path, value.dump(2) + "\n");
}

std::vector<nlohmann::json> ReadJsonLines(const fs::path& path) {
  const std::string content = ReadFile(path);
  std::vector<nlohmann::json> out;
  std::size_t start = 0;
  std::size_t line_no = 0;
  while (start < content.size()) {
    std::size_t end = content.find('\n', start);
    const bool terminated = end != std::string::npos;
    if (!terminated) end = content.size();
    std::string_view line(content.data() + start, end - start);
    start = end + 1;
    ++line_no;
    if (line.empty()) continue;
    try {
      out.push_back(nlohmann::json::parse(line));
    } catch (const nlohmann::json::exception& e) {
      if (!terminated) break;
      throw Error(ErrorCode::kParseError,
                  fmt::format("{}:{}: {}", path.string(), line_no, e.what()));
    }
  }
  return out;
}

void WriteJsonLines(const fs::path& path,
                    const std::vector<nlohmann::json>& values) {
  std::string content;
  for (const auto& v : values) {
    content += v.dump();
    content.push_back('\n');
  }
  WriteFile(path, content);
}

}  // namespace emoint
