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

#ifndef EMOINT_COMMON_UTF8_H_
#define EMOINT_COMMON_UTF8_H_

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace emoint::utf8 {

// Decodes the code point starting at `pos` and advances `pos` past it.
// Malformed bytes decode to U+FFFD and consume a single byte.
char32_t Next(std::string_view s, std::size_t& pos);

void Append(std::string& out, char32_t cp);

std::vector<char32_t> Decode(std::string_view s);
std::string Encode(const std::vector<char32_t>& cps);

// Number of code points.
std::size_t Length(std::string_view s);

bool IsSpace(char32_t cp);
bool IsDigit(char32_t cp);
// Letters of the Latin scripts (ASCII, Latin-1, Latin Extended-A/B), which
// covers Polish. Other scripts are treated as letters when they fall in the
// general letter blocks.
bool IsLetter(char32_t cp);
bool IsUpper(char32_t cp);
bool IsWordChar(char32_t cp);
char32_t ToLower(char32_t cp);
std::string ToLower(std::string_view s);

}  // namespace emoint::utf8

#endif  // EMOINT_COMMON_UTF8_H_
