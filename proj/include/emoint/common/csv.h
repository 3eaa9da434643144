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

#ifndef EMOINT_COMMON_CSV_H_
#define EMOINT_COMMON_CSV_H_

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace emoint::csv {

using Row = std::vector<std::string>;

// Splits one line on commas, honouring double-quoted fields.
Row ParseLine(std::string_view line);
std::string FormatLine(const Row& row);

struct Table {
  Row header;
  std::vector<Row> rows;

  // Index of a header column; throws kParseError when absent.
  std::size_t Column(std::string_view name) const;
};

Table Read(const std::filesystem::path& path);
Table ReadString(std::string_view content);
void Write(const std::filesystem::path& path, const Table& table);
std::string WriteString(const Table& table);

}  // namespace emoint::csv

#endif  // EMOINT_COMMON_CSV_H_
