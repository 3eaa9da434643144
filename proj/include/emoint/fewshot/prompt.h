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

#ifndef EMOINT_FEWSHOT_PROMPT_H_
#define EMOINT_FEWSHOT_PROMPT_H_

#include <array>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "emoint/common/metrics.h"
#include "emoint/fewshot/selection.h"

namespace emoint::fewshot {

// Placeholders: {emotion} in the basic instruction; {index}, {text} and
// {score} in the exemplar and target blocks.
class PromptTemplates {
 public:
  // Reads basic.txt, valence.txt, arousal.txt, exemplar.txt, target.txt and
  // emotion_names.json from `dir`. One trailing newline per file is dropped.
  // Throws kTemplateMissing.
  static PromptTemplates Load(const std::filesystem::path& dir);
  // $EMOINT_TEMPLATES when set, else the directory bundled with the build.
  static PromptTemplates LoadDefault();

  std::string Instruction(Metric metric) const;
  std::string ExemplarBlock(int index, std::string_view text,
                            int score) const;
  std::string TargetBlock(int index, std::string_view text) const;

  // Instruction plus exemplar blocks, separated by single spaces.
  std::string Prefix(Metric metric,
                     const std::vector<Exemplar>& exemplars) const;
  // Full prompt ending with the target block.
  std::string Render(const ShotPlan& plan, std::string_view target_text) const;

 private:
  std::string basic_;
  std::string valence_;
  std::string arousal_;
  std::string exemplar_;
  std::string target_;
  std::array<std::string, kBasicMetricCount> emotion_names_;
};

// Fills plan.prompt_prefix.
void AttachPrefix(const PromptTemplates& templates, ShotPlan& plan);

}  // namespace emoint::fewshot

#endif  // EMOINT_FEWSHOT_PROMPT_H_
