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

#include "emoint/llmrun/parse.h"

#include <string>
#include <vector>

#include "emoint/common/error.h"

namespace emoint::llmrun {
namespace {

bool IsDigit(char c) { return c >= '0' && c <= '9'; }

struct Token {
  bool negative;
  // Saturated so that long digit runs stay out of range.
  long value;
};

std::vector<Token> IntegerTokens(std::string_view s) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < s.size()) {
    if (!IsDigit(s[i])) {
      ++i;
      continue;
    }
    const bool negative = i > 0 && s[i - 1] == '-' &&
                          (i < 2 || !IsDigit(s[i - 2]));
    long value = 0;
    while (i < s.size() && IsDigit(s[i])) {
      value = std::min(1000000L, value * 10 + (s[i] - '0'));
      ++i;
    }
    out.push_back({negative, value});
  }
  return out;
}

}  // namespace

std::string_view RejectReasonName(RejectReason reason) {
  switch (reason) {
    case RejectReason::kNone: return "";
    case RejectReason::kNoNumber: return "no_number";
    case RejectReason::kOutOfRange: return "out_of_range";
    case RejectReason::kAmbiguous: return "ambiguous";
  }
  return "";
}

RejectReason ParseRejectReason(std::string_view name) {
  for (RejectReason r : {RejectReason::kNone, RejectReason::kNoNumber,
                         RejectReason::kOutOfRange, RejectReason::kAmbiguous}) {
    if (RejectReasonName(r) == name) return r;
  }
  throw Error(ErrorCode::kParseError,
              "unknown reject reason '" + std::string(name) + "'");
}

ParsedScore ParseScore(std::string_view reply) {
  const std::vector<Token> tokens = IntegerTokens(reply);
  if (tokens.empty()) return {std::nullopt, RejectReason::kNoNumber};
  const Token& first = tokens.front();
  if (first.negative || first.value < 1 || first.value > 5) {
    return {std::nullopt, RejectReason::kOutOfRange};
  }
  for (std::size_t i = 1; i < tokens.size(); ++i) {
    const Token& t = tokens[i];
    if (!t.negative && t.value >= 1 && t.value <= 5 && t.value != first.value) {
      return {std::nullopt, RejectReason::kAmbiguous};
    }
  }
  return {static_cast<int>(first.value), RejectReason::kNone};
}

}  // namespace emoint::llmrun
