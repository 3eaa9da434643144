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

#include "emoint/fewshot/prompt.h"

#include <fmt/core.h>

#include "emoint/common/error.h"
#include "emoint/common/files.h"
#include "emoint/common/url.h"
#include "json.hpp"

#ifndef EMOINT_TEMPLATE_DIR
#define EMOINT_TEMPLATE_DIR "templates/prompts"
#endif

namespace emoint::fewshot {
namespace {

std::string ReadTemplate(const std::filesystem::path& path) {
  if (!std::filesystem::is_regular_file(path)) {
    throw Error(ErrorCode::kTemplateMissing,
                fmt::format("prompt template '{}' not found", path.string()));
  }
  std::string s = ReadFile(path);
  if (!s.empty() && s.back() == '\n') s.pop_back();
  if (!s.empty() && s.back() == '\r') s.pop_back();
  return s;
}

void ReplaceAll(std::string& s, std::string_view from, std::string_view to) {
  for (std::size_t pos = s.find(from); pos != std::string::npos;
       pos = s.find(from, pos + to.size())) {
    s.replace(pos, from.size(), to);
  }
}

void RequirePlaceholder(const std::string& tmpl, std::string_view name,
                        std::string_view file) {
  if (tmpl.find(name) == std::string::npos) {
    throw Error(ErrorCode::kTemplateMissing,
                fmt::format("template {} lacks {}", file, name));
  }
}

}  // namespace

PromptTemplates PromptTemplates::Load(const std::filesystem::path& dir) {
  PromptTemplates t;
  t.basic_ = ReadTemplate(dir / "basic.txt");
  t.valence_ = ReadTemplate(dir / "valence.txt");
  t.arousal_ = ReadTemplate(dir / "arousal.txt");
  t.exemplar_ = ReadTemplate(dir / "exemplar.txt");
  t.target_ = ReadTemplate(dir / "target.txt");
  RequirePlaceholder(t.basic_, "{emotion}", "basic.txt");
  for (std::string_view p : {"{index}", "{text}", "{score}"}) {
    RequirePlaceholder(t.exemplar_, p, "exemplar.txt");
  }
  for (std::string_view p : {"{index}", "{text}"}) {
    RequirePlaceholder(t.target_, p, "target.txt");
  }
  const std::filesystem::path names = dir / "emotion_names.json";
  if (!std::filesystem::is_regular_file(names)) {
    throw Error(ErrorCode::kTemplateMissing,
                fmt::format("'{}' not found", names.string()));
  }
  const nlohmann::json j = ReadJson(names);
  for (std::size_t i = 0; i < kBasicMetricCount; ++i) {
    const std::string key(MetricKey(kAllMetrics[i]));
    if (!j.contains(key) || !j[key].is_string()) {
      throw Error(ErrorCode::kTemplateMissing,
                  fmt::format("no prompt name for emotion '{}'", key));
    }
    t.emotion_names_[i] = j[key].get<std::string>();
  }
  return t;
}

PromptTemplates PromptTemplates::LoadDefault() {
  const std::string dir = EnvOr("EMOINT_TEMPLATES", EMOINT_TEMPLATE_DIR);
  return Load(dir);
}

std::string PromptTemplates::Instruction(Metric metric) const {
  switch (metric) {
    case Metric::kValence:
      return valence_;
    case Metric::kArousal:
      return arousal_;
    default: {
      std::string s = basic_;
      ReplaceAll(s, "{emotion}", emotion_names_[Index(metric)]);
      return s;
    }
  }
}

std::string PromptTemplates::ExemplarBlock(int index, std::string_view text,
                                           int score) const {
  // {text} goes last so text containing placeholders stays literal.
  std::string s = exemplar_;
  ReplaceAll(s, "{index}", std::to_string(index));
  ReplaceAll(s, "{score}", std::to_string(score));
  ReplaceAll(s, "{text}", text);
  return s;
}

std::string PromptTemplates::TargetBlock(int index,
                                         std::string_view text) const {
  std::string s = target_;
  ReplaceAll(s, "{index}", std::to_string(index));
  ReplaceAll(s, "{text}", text);
  return s;
}

std::string PromptTemplates::Prefix(
    Metric metric, const std::vector<Exemplar>& exemplars) const {
  std::string s = Instruction(metric);
  int index = 1;
  for (const Exemplar& e : exemplars) {
    s += ' ';
    s += ExemplarBlock(index++, e.clean_text, e.score);
  }
  return s;
}

std::string PromptTemplates::Render(const ShotPlan& plan,
                                    std::string_view target_text) const {
  std::string s = Prefix(plan.metric, plan.exemplars);
  s += ' ';
  s += TargetBlock(static_cast<int>(plan.exemplars.size()) + 1, target_text);
  return s;
}

void AttachPrefix(const PromptTemplates& templates, ShotPlan& plan) {
  plan.prompt_prefix = templates.Prefix(plan.metric, plan.exemplars);
}

}  // namespace emoint::fewshot
