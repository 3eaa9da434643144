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

#include "emoint/common/csv.h"

#include <fmt/core.h>

#include "emoint/common/error.h"
#include "emoint/common/files.h"

namespace emoint::csv {

Row ParseLine(std::string_view line) {
  Row row;
  std::string field;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field.push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      row.push_back(std::move(field));
      field.clear();
    } else if (c != '\r') {
      field.push_back(c);
    }
  }
  row.push_back(std::move(field));
  return row;
}

std::string FormatLine(const Row& row) {
  std::string out;
  for (std::size_t i = 0; i < row.size(); ++i) {
    if (i > 0) out.push_back(',');
    const std::string& f = row[i];
    if (f.find_first_of(",\"\n\r") == std::string::npos) {
      out += f;
      continue;
    }
    out.push_back('"');
    for (char c : f) {
      if (c == '"') out.push_back('"');
      out.push_back(c);
    }
    out.push_back('"');
  }
  return out;
}

std::size_t Table::Column(std::string_view name) const {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return i;
  }
  throw Error(ErrorCode::kParseError,
              fmt::format("missing column '{}'", name));
}

Table ReadString(std::string_view content) {
  Table table;
  bool first = true;
  std::size_t start = 0;
  std::size_t line_no = 0;
  while (start < content.size()) {
    std::size_t end = content.find('\n', start);
    if (end == std::string_view::npos) end = content.size();
    std::string_view line = content.substr(start, end - start);
    start = end + 1;
    ++line_no;
    if (line.empty() || line == "\r") continue;
    Row row = ParseLine(line);
    if (first) {
      table.header = std::move(row);
      first = false;
      continue;
    }
    if (row.size() != table.header.size()) {
      throw Error(ErrorCode::kParseError,
                  fmt::format("line {}: expected {} fields, got {}", line_no,
                              table.header.size(), row.size()));
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

Table Read(const std::filesystem::path& path) {
  try {
    return ReadString(ReadFile(path));
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kParseError) throw;
    throw Error(ErrorCode::kParseError,
                fmt::format("{}: {}", path.string(), e.what()));
  }
}

std::string WriteString(const Table& table) {
  std::string out = FormatLine(table.header);
  out.push_back('\n');
  for (const Row& row : table.rows) {
    out += FormatLine(row);
    out.push_back('\n');
  }
  return out;
}

void Write(const std::filesystem::path& path, const Table& table) {
  WriteFile(path, WriteString(table));
}

}  // namespace emoint::csv
