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

#ifndef EMOINT_PIPELINE_SYNTHETIC_H_
#define EMOINT_PIPELINE_SYNTHETIC_H_

#include <cstdint>
#include <vector>

#include "emoint/annostore/plan.h"
#include "emoint/annostore/rating.h"
#include "emoint/dataprep/lexicon.h"
#include "emoint/dataprep/text_record.h"
#include "emoint/pipeline/config.h"

namespace emoint::pipeline {

// Offline stand-ins for the scraped corpus, the affective lexicon and the
// human raters. All output is a pure function of the arguments.

// Raw posts over all platforms, with links, mentions, multi-sentence
// Facebook posts and a few over-long texts.
std::vector<dataprep::TextRecord> SyntheticCorpus(std::size_t n,
                                                  std::uint64_t seed);

std::vector<dataprep::LexiconEntry> SyntheticLexicon();

// One final rating per (assigned annotator, text). Each text has a latent
// intensity per metric; raters add noise, round and clamp to the scale.
std::vector<annostore::RatingRecord> SimulateRatings(
    const annostore::AssignmentPlan& plan, const SimulationConfig& model,
    std::uint64_t seed);

}  // namespace emoint::pipeline

#endif  // EMOINT_PIPELINE_SYNTHETIC_H_
