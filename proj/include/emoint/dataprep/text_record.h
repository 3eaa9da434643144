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

#ifndef EMOINT_DATAPREP_TEXT_RECORD_H_
#define EMOINT_DATAPREP_TEXT_RECORD_H_

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace emoint::dataprep {

enum class Platform { kTwitter, kYoutube, kFacebook, kOther };

std::string_view PlatformName(Platform p);
// Unrecognised names map to kOther.
Platform ParsePlatform(std::string_view name);

struct TextRecord {
  std::string id;
  Platform platform = Platform::kOther;
  std::string raw_text;
  std::string clean_text;
  // Code points in clean_text.
  std::size_t char_len = 0;
  bool lang_ok = true;
  // Lexicon weight; unset until scored.
  std::optional<double> weight;
};

// Corpus records on disk: {id, platform, text} plus, once cleaned,
// {clean_text, char_len, weight}.
nlohmann::json ToJson(const TextRecord& r);
TextRecord FromJson(const nlohmann::json& j);

std::vector<TextRecord> ReadCorpus(const std::filesystem::path& path);
void WriteCorpus(const std::filesystem::path& path,
                 const std::vector<TextRecord>& records);

}  // namespace emoint::dataprep

#endif  // EMOINT_DATAPREP_TEXT_RECORD_H_
