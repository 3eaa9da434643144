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

#ifndef EMOINT_LLMRUN_PARSE_H_
#define EMOINT_LLMRUN_PARSE_H_

#include <optional>
#include <string_view>

namespace emoint::llmrun {

enum class RejectReason { kNone, kNoNumber, kOutOfRange, kAmbiguous };

std::string_view RejectReasonName(RejectReason reason);
RejectReason ParseRejectReason(std::string_view name);

struct ParsedScore {
  std::optional<int> score;
  RejectReason reason = RejectReason::kNone;

  bool ok() const { return score.has_value(); }
};

// Takes the first integer token of the reply. Accepted iff it lies in 1..5
// and no different value in 1..5 appears later; a leading minus sign makes
// it out of range.
ParsedScore ParseScore(std::string_view reply);

}  // namespace emoint::llmrun

#endif  // EMOINT_LLMRUN_PARSE_H_
