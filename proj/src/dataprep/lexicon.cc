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

#include "emoint/dataprep/lexicon.h"

#include <algorithm>
#include <array>
#include <cmath>

#include <fmt/core.h>

#include "emoint/common/csv.h"
#include "emoint/common/error.h"
#include "emoint/common/utf8.h"
#include "emoint/dataprep/cleaning.h"

namespace emoint::dataprep {

Lexicon Lexicon::FromEntries(std::vector<LexiconEntry> entries) {
  Lexicon lex;
  lex.entries_.reserve(entries.size());
  for (LexiconEntry& e : entries) {
    e.stem = utf8::ToLower(e.stem);
    if (e.stem.empty()) {
      throw Error(ErrorCode::kParseError, "lexicon entry with empty stem");
    }
    if (lex.index_.contains(e.stem)) {
      throw Error(ErrorCode::kDuplicateStem,
                  fmt::format("duplicate lexicon stem '{}'", e.stem));
    }
    lex.index_.emplace(e.stem, lex.entries_.size());
    lex.entries_.push_back(std::move(e));
  }
  return lex;
}

Lexicon Lexicon::Load(const std::filesystem::path& path) {
  const csv::Table table = csv::Read(path);
  const std::size_t stem = table.Column("stem");
  const std::size_t val = table.Column("valence");
  const std::size_t aro = table.Column("arousal");
  const std::size_t dom = table.Column("dominance");
  std::vector<LexiconEntry> entries;
  entries.reserve(table.rows.size());
  for (const csv::Row& row : table.rows) {
    try {
      entries.push_back({row[stem], std::stod(row[val]), std::stod(row[aro]),
                         std::stod(row[dom])});
    } catch (const std::logic_error&) {
      throw Error(ErrorCode::kParseError,
                  fmt::format("{}: bad norm values for '{}'", path.string(),
                              row[stem]));
    }
  }
  return FromEntries(std::move(entries));
}

const LexiconEntry* Lexicon::Find(std::string_view stem) const {
  auto it = index_.find(std::string(stem));
  return it == index_.end() ? nullptr : &entries_[it->second];
}

std::string SuffixStemmer::Stem(std::string_view word) const {
  // Longest endings first.
  static constexpr std::array<std::string_view, 28> kEndings = {
      "owania", "owanie", "ościach", "ością", "ości", "ami", "ach", "ego",
      "emu",    "ymi",    "imi",     "ych",   "ich",  "owi", "ów",  "om",
      "ie",     "ej",     "ą",       "ę",     "y",    "i",   "a",   "e",
      "o",      "u",      "ść",      "ć"};
  constexpr std::size_t kMinStem = 3;
  const std::vector<char32_t> cps = utf8::Decode(word);
  std::size_t best = 0;
  for (std::string_view ending : kEndings) {
    const std::size_t len = utf8::Length(ending);
    if (len <= best || cps.size() < len + kMinStem) continue;
    if (word.ends_with(ending)) best = len;
  }
  return utf8::Encode(
      std::vector<char32_t>(cps.begin(), cps.end() - static_cast<long>(best)));
}

std::vector<std::string> Tokenize(std::string_view clean_text) {
  std::vector<std::string> tokens;
  std::string current;
  auto flush = [&] {
    if (!current.empty() && current != kLinkToken && current != kUserToken) {
      tokens.push_back(current);
    }
    current.clear();
  };
  std::size_t pos = 0;
  while (pos < clean_text.size()) {
    const char32_t cp = utf8::Next(clean_text, pos);
    if (utf8::IsWordChar(cp)) {
      utf8::Append(current, utf8::ToLower(cp));
    } else {
      flush();
    }
  }
  flush();
  return tokens;
}

LexiconMeans LexiconAverages(std::string_view clean_text,
                             const Lexicon& lexicon, const Stemmer& stemmer) {
  LexiconMeans m;
  for (const std::string& token : Tokenize(clean_text)) {
    const LexiconEntry* e = lexicon.Find(stemmer.Stem(token));
    if (e == nullptr) continue;
    m.valence += e->valence;
    m.arousal += e->arousal;
    m.dominance += e->dominance;
    ++m.matched;
  }
  if (m.matched > 0) {
    const double n = static_cast<double>(m.matched);
    m.valence /= n;
    m.arousal /= n;
    m.dominance /= n;
  }
  return m;
}

double LexiconScore(const TextRecord& record, const Lexicon& lexicon,
                    const Stemmer& stemmer) {
  if (lexicon.empty()) {
    throw Error(ErrorCode::kLexiconMissing, "lexicon is empty");
  }
  const LexiconMeans m =
      LexiconAverages(record.clean_text, lexicon, stemmer);
  return std::max(0.0, m.valence + m.arousal + m.dominance);
}

}  // namespace emoint::dataprep
