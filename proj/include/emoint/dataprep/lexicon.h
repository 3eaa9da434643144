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

#ifndef EMOINT_DATAPREP_LEXICON_H_
#define EMOINT_DATAPREP_LEXICON_H_

#include <filesystem>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "emoint/dataprep/text_record.h"

namespace emoint::dataprep {

struct LexiconEntry {
  std::string stem;
  double valence = 0.0;
  double arousal = 0.0;
  double dominance = 0.0;
};

class Lexicon {
 public:
  Lexicon() = default;
  // Stems are lowercased. Empty or duplicate stems throw kDuplicateStem /
  // kParseError.
  static Lexicon FromEntries(std::vector<LexiconEntry> entries);
  // Delimited file with header "stem,valence,arousal,dominance".
  static Lexicon Load(const std::filesystem::path& path);

  const LexiconEntry* Find(std::string_view stem) const;
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }

 private:
  std::vector<LexiconEntry> entries_;
  std::unordered_map<std::string, std::size_t> index_;
};

class Stemmer {
 public:
  virtual ~Stemmer() = default;
  // Input is a lowercased word.
  virtual std::string Stem(std::string_view word) const = 0;
};

class IdentityStemmer : public Stemmer {
 public:
  std::string Stem(std::string_view word) const override {
    return std::string(word);
  }
};

// Strips the longest matching Polish inflectional ending, keeping at least
// three code points of stem.
class SuffixStemmer : public Stemmer {
 public:
  std::string Stem(std::string_view word) const override;
};

// Lowercased word tokens of a cleaned text; placeholder tokens are dropped.
std::vector<std::string> Tokenize(std::string_view clean_text);

struct LexiconMeans {
  double valence = 0.0;
  double arousal = 0.0;
  double dominance = 0.0;
  std::size_t matched = 0;
};

LexiconMeans LexiconAverages(std::string_view clean_text,
                             const Lexicon& lexicon, const Stemmer& stemmer);

// Sum of the three per-dimension means over matched stems, floored at 0.
// Throws kLexiconMissing when the lexicon is empty.
double LexiconScore(const TextRecord& record, const Lexicon& lexicon,
                    const Stemmer& stemmer);

}  // namespace emoint::dataprep

#endif  // EMOINT_DATAPREP_LEXICON_H_
