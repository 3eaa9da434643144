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

#include "emoint/dataprep/cleaning.h"

#include <algorithm>
#include <array>

#include <fmt/core.h>

#include "emoint/common/utf8.h"

namespace emoint::dataprep {

namespace {

using CodePoints = std::vector<char32_t>;

void AppendAscii(CodePoints& out, std::string_view s) {
  for (char c : s) out.push_back(static_cast<char32_t>(c));
}

CodePoints MaskMentions(const CodePoints& in) {
  CodePoints out;
  out.reserve(in.size());
  std::size_t i = 0;
  while (i < in.size()) {
    if (in[i] != '@') {
      out.push_back(in[i++]);
      continue;
    }
    std::size_t j = i;
    while (j < in.size() && in[j] == '@') ++j;
    if (j < in.size() && utf8::IsWordChar(in[j])) {
      while (j < in.size() && utf8::IsWordChar(in[j])) ++j;
      AppendAscii(out, kUserToken);
    } else {
      out.insert(out.end(), in.begin() + i, in.begin() + j);
    }
    i = j;
  }
  return out;
}

// Length of the URL prefix starting at `pos`, or 0.
std::size_t UrlPrefixAt(const CodePoints& s, std::size_t pos) {
  static constexpr std::array<std::string_view, 3> kPrefixes = {
      "https://", "http://", "www."};
  for (std::string_view prefix : kPrefixes) {
    if (pos + prefix.size() > s.size()) continue;
    bool match = true;
    for (std::size_t k = 0; k < prefix.size(); ++k) {
      if (utf8::ToLower(s[pos + k]) != static_cast<char32_t>(prefix[k])) {
        match = false;
        break;
      }
    }
    if (match) return prefix.size();
  }
  return 0;
}

bool IsClosingPunct(char32_t cp) {
  switch (cp) {
    case '.': case ',': case ';': case ':': case '!': case '?':
    case ')': case ']': case '}': case '"': case '\'':
    case 0x2026:  // …
    case 0x00BB:  // »
    case 0x201D:  // ”
    case 0x2019:  // ’
      return true;
    default:
      return false;
  }
}

CodePoints MaskUrls(const CodePoints& in) {
  CodePoints out;
  out.reserve(in.size());
  std::size_t i = 0;
  while (i < in.size()) {
    const bool boundary = i == 0 || !utf8::IsWordChar(in[i - 1]);
    const std::size_t prefix = boundary ? UrlPrefixAt(in, i) : 0;
    if (prefix == 0) {
      out.push_back(in[i++]);
      continue;
    }
    std::size_t end = i + prefix;
    while (end < in.size() && !utf8::IsSpace(in[end])) ++end;
    std::size_t body_end = end;
    while (body_end > i + prefix && IsClosingPunct(in[body_end - 1])) {
      --body_end;
    }
    AppendAscii(out, kLinkToken);
    out.insert(out.end(), in.begin() + body_end, in.begin() + end);
    i = end;
  }
  return out;
}

CodePoints NormalizeWhitespace(const CodePoints& in) {
  CodePoints out;
  out.reserve(in.size());
  bool pending_space = false;
  for (char32_t cp : in) {
    if (utf8::IsSpace(cp)) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) out.push_back(' ');
    pending_space = false;
    out.push_back(cp);
  }
  return out;
}

bool IsSentenceEnd(char32_t cp) {
  return cp == '.' || cp == '!' || cp == '?' || cp == 0x2026;
}

bool IsOpeningPunct(char32_t cp) {
  return cp == '(' || cp == '[' || cp == '"' || cp == '\'' ||
         cp == 0x201E || cp == 0x201C || cp == 0x00AB;
}

// Lowercase stems that end with '.' without closing a sentence.
constexpr std::array<std::string_view, 48> kAbbreviations = {
    "prof", "dr",  "hab",  "mgr", "inż", "lek",  "np",   "tj",
    "tzn",  "itd", "itp",  "ul",  "al",  "pl",   "nr",   "str",
    "godz", "ok",  "ww",   "wg",  "św",  "ks",   "red",  "tys",
    "mln",  "mld", "zł",   "gr",  "r",   "w",    "pt",   "ds",
    "dot",  "ang", "gen",  "płk", "min", "wiceprem", "prem", "p.o",
    "m.in", "tzw", "im",   "ur",  "zm",  "jw",   "tel", "pkt"};

bool IsAbbreviation(const CodePoints& s, std::size_t dot) {
  std::size_t start = dot;
  while (start > 0 && !utf8::IsSpace(s[start - 1])) --start;
  while (start < dot && IsOpeningPunct(s[start])) ++start;
  if (start == dot) return false;
  CodePoints word(s.begin() + start, s.begin() + dot);
  for (char32_t& cp : word) cp = utf8::ToLower(cp);
  // Single-letter initials ("J. Kowalski").
  if (word.size() == 1 && utf8::IsLetter(word[0])) return true;
  const std::string key = utf8::Encode(word);
  return std::find(kAbbreviations.begin(), kAbbreviations.end(), key) !=
         kAbbreviations.end();
}

}  // namespace

std::string CleanText(std::string_view raw) {
  CodePoints cps = utf8::Decode(raw);
  cps = MaskMentions(cps);
  cps = MaskUrls(cps);
  cps = NormalizeWhitespace(cps);
  return utf8::Encode(cps);
}

void CleanRecord(TextRecord& record) {
  record.clean_text = CleanText(record.raw_text);
  record.char_len = utf8::Length(record.clean_text);
}

std::vector<TextRecord> SplitSentences(const TextRecord& record) {
  const CodePoints s = utf8::Decode(record.clean_text);
  std::vector<CodePoints> pieces;
  std::size_t start = 0;
  std::size_t i = 0;
  while (i < s.size()) {
    if (!IsSentenceEnd(s[i])) {
      ++i;
      continue;
    }
    std::size_t run_end = i;
    while (run_end < s.size() && IsSentenceEnd(s[run_end])) ++run_end;
    const bool followed_by_space =
        run_end < s.size() && utf8::IsSpace(s[run_end]);
    std::size_t next = run_end;
    while (next < s.size() && utf8::IsSpace(s[next])) ++next;
    const bool capital_next =
        next < s.size() && (utf8::IsUpper(s[next]) || utf8::IsDigit(s[next]));
    const bool abbreviation =
        run_end - i == 1 && s[i] == '.' && IsAbbreviation(s, i);
    if (followed_by_space && capital_next && !abbreviation) {
      pieces.emplace_back(s.begin() + start, s.begin() + run_end);
      start = next;
    }
    i = run_end;
  }
  if (start < s.size() || pieces.empty()) {
    pieces.emplace_back(s.begin() + start, s.end());
  }

  std::vector<TextRecord> out;
  out.reserve(pieces.size());
  for (std::size_t n = 0; n < pieces.size(); ++n) {
    TextRecord child = record;
    child.id = fmt::format("{}_{}", record.id, n + 1);
    child.clean_text = utf8::Encode(NormalizeWhitespace(pieces[n]));
    child.raw_text = child.clean_text;
    child.char_len = utf8::Length(child.clean_text);
    out.push_back(std::move(child));
  }
  return out;
}

std::vector<TextRecord> LengthFilter(std::vector<TextRecord> records,
                                     std::size_t max_chars) {
  std::erase_if(records, [max_chars](const TextRecord& r) {
    return r.char_len > max_chars;
  });
  return records;
}

std::vector<TextRecord> CleanCorpus(const std::vector<TextRecord>& raw,
                                    const LanguageFilter& language,
                                    const CleaningOptions& options,
                                    CleaningStats* stats) {
  CleaningStats local;
  local.input = raw.size();
  std::vector<TextRecord> kept;
  for (TextRecord record : raw) {
    CleanRecord(record);
    std::vector<TextRecord> parts;
    if (options.split_platforms.contains(record.platform)) {
      parts = SplitSentences(record);
    } else {
      parts.push_back(std::move(record));
    }
    for (TextRecord& part : parts) {
      ++local.after_split;
      if (part.clean_text.empty()) {
        ++local.dropped_empty;
        continue;
      }
      part.lang_ok = language.Accept(part.clean_text);
      if (!part.lang_ok) {
        ++local.dropped_language;
        continue;
      }
      kept.push_back(std::move(part));
    }
  }
  const std::size_t before_length = kept.size();
  kept = LengthFilter(std::move(kept), options.max_chars);
  local.dropped_length = before_length - kept.size();
  local.output = kept.size();
  if (stats != nullptr) *stats = local;
  return kept;
}

}  // namespace emoint::dataprep
