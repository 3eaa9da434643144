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

#include "emoint/dataprep/text_record.h"

#include <fmt/core.h>

#include "emoint/common/error.h"
#include "emoint/common/files.h"
#include "emoint/common/utf8.h"

namespace emoint::dataprep {

std::string_view PlatformName(Platform p) {
  switch (p) {
    case Platform::kTwitter: return "twitter";
    case Platform::kYoutube: return "youtube";
    case Platform::kFacebook: return "facebook";
    case Platform::kOther: return "other";
  }
  return "other";
}

Platform ParsePlatform(std::string_view name) {
  const std::string lower = utf8::ToLower(name);
  if (lower == "twitter" || lower == "x") return Platform::kTwitter;
  if (lower == "youtube") return Platform::kYoutube;
  if (lower == "facebook") return Platform::kFacebook;
  return Platform::kOther;
}

nlohmann::json ToJson(const TextRecord& r) {
  nlohmann::json j = {
      {"id", r.id},
      {"platform", PlatformName(r.platform)},
      {"text", r.raw_text},
      {"clean_text", r.clean_text},
      {"char_len", r.char_len},
  };
  if (r.weight) j["weight"] = *r.weight;
  return j;
}

TextRecord FromJson(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("id") || !j.contains("text")) {
    throw Error(ErrorCode::kParseError,
                "corpus record needs at least {id, text}");
  }
  TextRecord r;
  const auto& id = j.at("id");
  r.id = id.is_string() ? id.get<std::string>() : id.dump();
  r.platform = ParsePlatform(j.value("platform", "other"));
  r.raw_text = j.at("text").get<std::string>();
  if (j.contains("clean_text")) {
    r.clean_text = j.at("clean_text").get<std::string>();
    r.char_len = utf8::Length(r.clean_text);
  }
  if (j.contains("weight") && !j.at("weight").is_null()) {
    r.weight = j.at("weight").get<double>();
  }
  return r;
}

std::vector<TextRecord> ReadCorpus(const std::filesystem::path& path) {
  std::vector<TextRecord> out;
  for (const auto& j : ReadJsonLines(path)) out.push_back(FromJson(j));
  return out;
}

void WriteCorpus(const std::filesystem::path& path,
                 const std::vector<TextRecord>& records) {
  std::vector<nlohmann::json> lines;
  lines.reserve(records.size());
  for (const auto& r : records) lines.push_back(ToJson(r));
  WriteJsonLines(path, lines);
}

}  // namespace emoint::dataprep
