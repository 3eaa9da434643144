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

#ifndef EMOINT_COMMON_ERROR_H_
#define EMOINT_COMMON_ERROR_H_

#include <stdexcept>
#include <string>
#include <string_view>

namespace emoint {

// Every failure raised by the library carries one of these codes. The CLI
// prints the code name in its machine-readable error JSON.
enum class ErrorCode {
  kInvalidArgument,
  kIoError,
  kParseError,
  kConfigError,
  kMissingUpstream,
  // dataprep
  kLexiconMissing,
  kDuplicateStem,
  kInsufficientPool,
  kAllZeroWeights,
  kDegenerateMetric,
  kTooFewRecords,
  // annostore
  kInfeasiblePlan,
  kNotAssigned,
  kScaleViolation,
  kAlreadyFinal,
  kUnknownAnnotator,
  kNoRatings,
  // reliability
  kInvalidMatrix,
  kDegenerateVariance,
  // fewshot
  kProviderError,
  kDegenerateCentroid,
  kBadK,
  kNotEnoughCandidates,
  kTemplateMissing,
  // llmrun
  kTransportError,
  kUnknownModel,
  // evaluation
  kDegenerateInput,
  kNoData,
  kMissingK,
  kWrongFoldCount,
  kCoverageMismatch,
};

std::string_view ErrorCodeName(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace emoint

#endif  // EMOINT_COMMON_ERROR_H_
