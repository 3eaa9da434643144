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

#include "emoint/common/error.h"

namespace emoint {

std::string_view ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kIoError: return "IoError";
    case ErrorCode::kParseError: return "ParseError";
    case ErrorCode::kConfigError: return "ConfigError";
    case ErrorCode::kMissingUpstream: return "MissingUpstream";
    case ErrorCode::kLexiconMissing: return "LexiconMissing";
    case ErrorCode::kDuplicateStem: return "DuplicateStem";
    case ErrorCode::kInsufficientPool: return "InsufficientPool";
    case ErrorCode::kAllZeroWeights: return "AllZeroWeights";
    case ErrorCode::kDegenerateMetric: return "DegenerateMetric";
    case ErrorCode::kTooFewRecords: return "TooFewRecords";
    case ErrorCode::kInfeasiblePlan: return "InfeasiblePlan";
    case ErrorCode::kNotAssigned: return "NotAssigned";
    case ErrorCode::kScaleViolation: return "ScaleViolation";
    case ErrorCode::kAlreadyFinal: return "AlreadyFinal";
    case ErrorCode::kUnknownAnnotator: return "UnknownAnnotator";
    case ErrorCode::kNoRatings: return "NoRatings";
    case ErrorCode::kInvalidMatrix: return "InvalidMatrix";
    case ErrorCode::kDegenerateVariance: return "DegenerateVariance";
    case ErrorCode::kProviderError: return "ProviderError";
    case ErrorCode::kDegenerateCentroid: return "DegenerateCentroid";
    case ErrorCode::kBadK: return "BadK";
    case ErrorCode::kNotEnoughCandidates: return "NotEnoughCandidates";
    case ErrorCode::kTemplateMissing: return "TemplateMissing";
    case ErrorCode::kTransportError: return "TransportError";
    case ErrorCode::kUnknownModel: return "UnknownModel";
    case ErrorCode::kDegenerateInput: return "DegenerateInput";
    case ErrorCode::kNoData: return "NoData";
    case ErrorCode::kMissingK: return "MissingK";
    case ErrorCode::kWrongFoldCount: return "WrongFoldCount";
    case ErrorCode::kCoverageMismatch: return "CoverageMismatch";
  }
  return "Unknown";
}

}  // namespace emoint
