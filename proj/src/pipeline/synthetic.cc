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

#include "emoint/pipeline/synthetic.h"

#include <algorithm>
#include <cmath>
#include <string_view>

#include <fmt/format.h>

#include "emoint/common/hash.h"
#include "emoint/common/metrics.h"
#include "emoint/common/rng.h"

namespace emoint::pipeline {
namespace {

using dataprep::Platform;
using dataprep::TextRecord;

struct Word {
  std::string_view text;
  double valence;
  double arousal;
  double dominance;
};

// Affect-bearing vocabulary; the others carry no lexicon entry.
constexpr Word kAffective[] = {
    {"radość", 8.1, 6.0, 6.2},       {"szczęście", 8.4, 5.5, 6.5},
    {"smutek", 2.1, 3.8, 3.0},       {"złość", 2.0, 7.6, 5.8},
    {"wstyd", 2.4, 5.1, 2.6},        {"strach", 1.9, 7.2, 2.4},
    {"duma", 7.6, 6.1, 7.4},         {"skandal", 1.8, 7.9, 4.6},
    {"kłamstwo", 1.7, 6.5, 3.9},     {"zwycięstwo", 8.0, 7.3, 7.8},
    {"nadzieja", 7.4, 4.9, 5.9},     {"obrzydliwe", 1.5, 6.4, 4.2},
    {"wspaniale", 8.3, 6.6, 6.7},    {"tragedia", 1.4, 6.9, 2.7},
    {"gratulacje", 8.2, 6.2, 6.6},   {"oburzenie", 2.3, 7.4, 5.1},
    {"spokój", 6.9, 2.1, 5.7},       {"dziękuję", 7.8, 4.4, 6.0},
    {"zagrożenie", 2.2, 7.0, 3.1},   {"wolność", 8.0, 5.8, 7.1},
};

constexpr std::string_view kNeutral[] = {
    "rząd",     "sejm",    "ustawa",  "projekt", "minister", "posłowie",
    "budżet",   "rada",    "miasto",  "gmina",   "wybory",   "kampania",
    "program",  "partia",  "debata",  "decyzja", "komisja",  "spotkanie",
    "dzisiaj",  "jutro",   "teraz",   "bardzo",  "wszyscy",  "ludzie",
    "sprawa",   "kraj",    "prawo",   "podatki", "szkoła",   "szpital",
};

constexpr std::string_view kHandles[] = {"@kancelaria", "@posel_nowak",
                                         "@gazeta", "@tvinfo"};
constexpr std::string_view kLinks[] = {"https://example.org/artykul",
                                       "http://t.co/abc123",
                                       "www.example.pl/wywiad"};

std::string Sentence(Rng& rng, std::size_t words) {
  std::string out;
  for (std::size_t i = 0; i < words; ++i) {
    std::string_view w;
    if (rng.Uniform() < 0.3) {
      w = kAffective[rng.Index(std::size(kAffective))].text;
    } else {
      w = kNeutral[rng.Index(std::size(kNeutral))];
    }
    if (!out.empty()) out += ' ';
    out += w;
  }
  if (!out.empty()) {
    // Capitalize ASCII initials only; the rest is left as generated.
    if (out[0] >= 'a' && out[0] <= 'z') out[0] = static_cast<char>(out[0] - 32);
  }
  constexpr std::string_view kEnds[] = {".", "!", "?", "..."};
  out += kEnds[rng.Index(std::size(kEnds))];
  return out;
}

Platform PlatformFor(Rng& rng) {
  const double u = rng.Uniform();
  if (u < 0.5) return Platform::kTwitter;
  if (u < 0.75) return Platform::kFacebook;
  return Platform::kYoutube;
}

int ClampRound(double v, int lo, int hi) {
  return std::clamp(static_cast<int>(std::lround(v)), lo, hi);
}

}  // namespace

std::vector<TextRecord> SyntheticCorpus(std::size_t n, std::uint64_t seed) {
  std::vector<TextRecord> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    Rng rng(DeriveSeed(seed, i));
    TextRecord r;
    r.id = fmt::format("syn{:06}", i);
    r.platform = PlatformFor(rng);
    const std::size_t sentences =
        r.platform == Platform::kFacebook ? 1 + rng.Index(3) : 1;
    std::string text;
    for (std::size_t s = 0; s < sentences; ++s) {
      if (!text.empty()) text += ' ';
      text += Sentence(rng, 4 + rng.Index(10));
    }
    if (rng.Uniform() < 0.3) {
      text = std::string(kHandles[rng.Index(std::size(kHandles))]) + " " + text;
    }
    if (rng.Uniform() < 0.3) {
      text += " ";
      text += kLinks[rng.Index(std::size(kLinks))];
    }
    // About one in fifty posts runs past the length cap.
    if (r.platform != Platform::kFacebook && rng.Uniform() < 0.02) {
      while (text.size() < 400) text += " " + Sentence(rng, 12);
    }
    r.raw_text = std::move(text);
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<dataprep::LexiconEntry> SyntheticLexicon() {
  const dataprep::SuffixStemmer stemmer;
  std::vector<dataprep::LexiconEntry> out;
  for (const Word& w : kAffective) {
    out.push_back({stemmer.Stem(w.text), w.valence, w.arousal, w.dominance});
  }
  std::sort(out.begin(), out.end(),
            [](const auto& a, const auto& b) { return a.stem < b.stem; });
  out.erase(std::unique(out.begin(), out.end(),
                        [](const auto& a, const auto& b) {
                          return a.stem == b.stem;
                        }),
            out.end());
  return out;
}

std::vector<annostore::RatingRecord> SimulateRatings(
    const annostore::AssignmentPlan& plan, const SimulationConfig& model,
    std::uint64_t seed) {
  std::map<std::string, std::vector<std::string>> raters_of_set;
  for (const auto& [who, sets] : plan.assignments) {
    for (const auto& s : sets) raters_of_set[s].push_back(who);
  }
  std::vector<annostore::RatingRecord> out;
  std::size_t tick = 0;
  for (const annostore::TextSet& set : plan.sets) {
    const auto& raters = raters_of_set[set.set_id];
    for (const std::string& text_id : set.text_ids) {
      Rng latent_rng(DeriveSeed(seed, Fnv1a64(text_id)));
      MetricArray latent{};
      for (Metric m : kAllMetrics) {
        const double centre = FamilyOf(m) == MetricFamily::kBasic
                                  ? model.emotion_mean
                                  : model.dimension_mean;
        latent[Index(m)] = latent_rng.Normal(centre, model.sigma_between);
      }
      for (const std::string& who : raters) {
        Rng noise(DeriveSeed(seed, Fnv1a64(text_id + "\x1f" + who)));
        annostore::RatingRecord r;
        r.annotator_id = who;
        r.text_id = text_id;
        r.set_id = set.set_id;
        r.status = annostore::RatingStatus::kFinal;
        for (Metric m : kAllMetrics) {
          const double v =
              latent[Index(m)] + noise.Normal(0.0, model.sigma_within);
          r.labels[Index(m)] = ClampRound(v, RawMin(m), RawMax(m));
        }
        // Fixed clock so reruns are byte-identical.
        const std::size_t s = tick++;
        r.submitted_at =
            fmt::format("2024-01-01T{:02}:{:02}:{:02}Z", (s / 3600) % 24,
                        (s / 60) % 60, s % 60);
        out.push_back(std::move(r));
      }
    }
  }
  return out;
}

}  // namespace emoint::pipeline
