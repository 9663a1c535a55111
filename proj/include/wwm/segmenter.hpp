// Copyright 2026 the wwm-pipeline authors.
// SPDX-License-Identifier: Apache-2.0
//
// Chinese word segmentation front-ends for whole-word masking. Word
// boundaries come from one of three sources:
//
//   fmm          -- forward maximum matching against a user lexicon, with
//                   single-character fallback (a classical CWS baseline;
//                   external segmenter output is preferred when available),
//   presegmented -- sentences arrive already segmented, space-delimited,
//   chars        -- every character is its own word, which reduces whole-
//                   word masking to the original character-level masking
//                   (useful as an experimental control).
//
// Word spans are codepoint offsets that tile the sentence's non-whitespace,
// so concatenating the words equals the sentence with whitespace removed.

#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

namespace wwm::seg {

enum class Mode { kFmm, kPresegmented, kChars };

// Parses "fmm" | "presegmented" | "char"; returns false on anything else.
bool parse_mode(std::string_view name, Mode& mode);
const char* mode_name(Mode mode);

struct Word {
  std::string text;
  uint32_t begin = 0;  // codepoint span [begin, end)
  uint32_t end = 0;
};

class Lexicon {
 public:
  // One word per line; '#' lines are comments; blank lines ignored.
  // Rejects (kData) an effectively empty lexicon.
  static Lexicon from_text(std::string_view text);
  static Lexicon load(const std::string& path);

  bool contains(std::string_view word) const {
    return words_.find(word) != words_.end();
  }
  uint32_t max_word_cps() const { return max_word_cps_; }
  size_t size() const { return words_.size(); }

 private:
  struct StringHash {
    using is_transparent = void;
    size_t operator()(std::string_view s) const {
      return std::hash<std::string_view>{}(s);
    }
  };
  std::unordered_set<std::string, StringHash, std::equal_to<>> words_;
  uint32_t max_word_cps_ = 1;
};

// Forward maximum matching over CJK runs. Non-CJK word-character runs
// (Latin, digits) are kept whole regardless of the lexicon; punctuation is
// one word per character; whitespace separates and is never part of a word.
std::vector<Word> fmm_segment(std::string_view sentence, const Lexicon& lexicon);

// One word per non-whitespace character.
std::vector<Word> char_segment(std::string_view sentence);

// Parses a pre-segmented line (words separated by ASCII whitespace). The
// returned spans index into the space-free concatenation of the words,
// which is also written to joined -- downstream tokenization must run on
// that string so token and word spans share a coordinate system.
std::vector<Word> parse_presegmented(std::string_view line, std::string& joined);

}  // namespace wwm::seg
