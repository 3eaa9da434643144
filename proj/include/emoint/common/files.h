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

#ifndef EMOINT_COMMON_FILES_H_
#define EMOINT_COMMON_FILES_H_

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace emoint {

std::string ReadFile(const std::filesystem::path& path);
// Writes through a temporary sibling and renames into place.
void WriteFile(const std::filesystem::path& path, std::string_view content);

nlohmann::json ReadJson(const std::filesystem::path& path);
void WriteJson(const std::filesystem::path& path, const nlohmann::json& value);

// Line-delimited JSON. A truncated trailing line (an interrupted append) is
// skipped; malformed lines elsewhere are errors.
std::vector<nlohmann::json> ReadJsonLines(const std::filesystem::path& path);
void WriteJsonLines(const std::filesystem::path& path,
                    const std::vector<nlohmann::json>& values);

}  // namespace emoint

#endif  // EMOINT_COMMON_FILES_H_
