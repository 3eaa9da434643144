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

#ifndef EMOINT_DATAPREP_CLEANING_H_
#define EMOINT_DATAPREP_CLEANING_H_

#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "emoint/dataprep/text_record.h"

namespace emoint::dataprep {

inline constexpr std::string_view kLinkToken = "_link_";
inline constexpr std::string_view kUserToken = "_user_";
inline constexpr std::size_t kMaxChars = 280;

// Masks mentions and URLs and normalises whitespace.
//
// A mention is one or more '@' followed by word characters. A URL starts
// with "http://", "https://" or "www." (case-insensitive) at a word boundary
// and runs to the next whitespace; trailing closing punctuation stays outside
// the mask. Mentions are masked before URLs, which makes the function
// idempotent.
std::string CleanText(std::string_view raw);

// Fills clean_text and char_len from raw_text.
void CleanRecord(TextRecord& record);

// Splits at '.', '!', '?' or '…' runs that are followed by whitespace and
// an uppercase letter or digit, unless the word before the '.' is a known
// abbreviation. Children get ids "<parent>_<n>", n from 1.
std::vector<TextRecord> SplitSentences(const TextRecord& record);

// Keeps records with char_len <= max_chars, preserving order.
std::vector<TextRecord> LengthFilter(std::vector<TextRecord> records,
                                     std::size_t max_chars = kMaxChars);

class LanguageFilter {
 public:
  virtual ~LanguageFilter() = default;
  virtual bool Accept(std::string_view text) const = 0;
};

class AcceptAllLanguages : public LanguageFilter {
 public:
  bool Accept(std::string_view) const override { return true; }
};

struct CleaningOptions {
  std::set<Platform> split_platforms = {Platform::kFacebook};
  std::size_t max_chars = kMaxChars;
};

struct CleaningStats {
  std::size_t input = 0;
  std::size_t after_split = 0;
  std::size_t dropped_empty = 0;
  std::size_t dropped_language = 0;
  std::size_t dropped_length = 0;
  std::size_t output = 0;
};

// clean -> sentence split -> language filter -> length filter, dropping
// records left empty.
std::vector<TextRecord> CleanCorpus(const std::vector<TextRecord>& raw,
                                    const LanguageFilter& language,
                                    const CleaningOptions& options,
                                    CleaningStats* stats = nullptr);

}  // namespace emoint::dataprep

#endif  // EMOINT_DATAPREP_CLEANING_H_
