// Copyright 2026 the wwm-pipeline authors.
// SPDX-License-Identifier: Apache-2.0

#include "wwm/segmenter.hpp"

#include <fstream>
#include <sstream>

#include "wwm/error.hpp"
#include "wwm/tokenizer.hpp"
#include "wwm/unicode.hpp"

namespace wwm::seg {
namespace {

// Decodes a sentence for segmentation, throwing kData on invalid UTF-8.
std::vector<uint32_t> decode_or_throw(std::string_view sentence,
                                      const char* who) {
  std::vector<uint32_t> cps;
  size_t bad = 0;
  if (!uni::decode_string(sentence, cps, bad)) {
    throw_data(std::string(who) + ": invalid UTF-8 at byte offset " +
               std::to_string(bad));
  }
  return cps;
}

std::string encode_range(const std::vector<uint32_t>& cps, uint32_t begin,
                         uint32_t end) {
  std::string out;
  for (uint32_t i = begin; i < end; ++i) uni::append_utf8(out, cps[i]);
  return out;
}

bool is_separator(uint32_t cp) {
  return tok::is_whitespace_char(cp) || tok::is_control_char(cp);
}

}  // namespace

bool parse_mode(std::string_view name, Mode& mode) {
  if (name == "fmm") {
    mode = Mode::kFmm;
  } else if (name == "presegmented") {
    mode = Mode::kPresegmented;
  } else if (name == "char") {
    mode = Mode::kChars;
  } else {
    return false;
  }
  return true;
}

const char* mode_name(Mode mode) {
  switch (mode) {
    case Mode::kFmm: return "fmm";
    case Mode::kPresegmented: return "presegmented";
    case Mode::kChars: return "char";
  }
  return "?";
}

Lexicon Lexicon::from_text(std::string_view text) {
  Lexicon lex;
  size_t line_start = 0;
  while (line_start < text.size()) {
    size_t nl = text.find('\n', line_start);
    std::string_view line =
        nl == std::string_view::npos
            ? text.substr(line_start)
            : text.substr(line_start, nl - line_start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (!line.empty() && line[0] != '#') {
      std::vector<uint32_t> cps;
      size_t bad = 0;
      if (!uni::decode_string(line, cps, bad)) {
        throw_data("lexicon: invalid UTF-8 in entry near byte offset " +
                   std::to_string(line_start + bad));
      }
      if (uint32_t(cps.size()) > lex.max_word_cps_) {
        lex.max_word_cps_ = uint32_t(cps.size());
      }
      lex.words_.emplace(line);
    }
    if (nl == std::string_view::npos) break;
    line_start = nl + 1;
  }
  if (lex.words_.empty()) throw_data("lexicon: no entries");
  return lex;
}

Lexicon Lexicon::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw_io("lexicon: cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw_io("lexicon: read failure on '" + path + "'");
  return from_text(buf.str());
}

std::vector<Word> fmm_segment(std::string_view sentence,
                              const Lexicon& lexicon) {
  std::vector<uint32_t> cps = decode_or_throw(sentence, "fmm_segment");
  std::vector<Word> words;
  std::string scratch;

  uint32_t i = 0;
  const uint32_t n = uint32_t(cps.size());
  while (i < n) {
    uint32_t cp = cps[i];
    if (is_separator(cp)) {
      ++i;
      continue;
    }
    if (tok::is_cjk_char(cp)) {
      // Longest lexicon match starting here, else a single character.
      uint32_t limit = std::min<uint32_t>(lexicon.max_word_cps(), n - i);
      uint32_t match_len = 1;
      for (uint32_t len = limit; len >= 2; --len) {
        scratch = encode_range(cps, i, i + len);
        if (lexicon.contains(scratch)) {
          match_len = len;
          break;
        }
      }
      words.push_back({encode_range(cps, i, i + match_len), i, i + match_len});
      i += match_len;
      continue;
    }
    if (tok::is_punctuation_char(cp)) {
      words.push_back({encode_range(cps, i, i + 1), i, i + 1});
      ++i;
      continue;
    }
    // Non-CJK word run (Latin letters, digits, symbols): kept whole
    // regardless of the lexicon.
    uint32_t start = i;
    while (i < n && !is_separator(cps[i]) && !tok::is_cjk_char(cps[i]) &&
           !tok::is_punctuation_char(cps[i])) {
      ++i;
    }
    words.push_back({encode_range(cps, start, i), start, i});
  }
  return words;
}

std::vector<Word> char_segment(std::string_view sentence) {
  std::vector<uint32_t> cps = decode_or_throw(sentence, "char_segment");
  std::vector<Word> words;
  for (uint32_t i = 0; i < uint32_t(cps.size()); ++i) {
    if (is_separator(cps[i])) continue;
    words.push_back({encode_range(cps, i, i + 1), i, i + 1});
  }
  return words;
}

std::vector<Word> parse_presegmented(std::string_view line,
                                     std::string& joined) {
  std::vector<uint32_t> cps = decode_or_throw(line, "parse_presegmented");
  std::vector<Word> words;
  joined.clear();

  uint32_t joined_cps = 0;
  uint32_t i = 0;
  const uint32_t n = uint32_t(cps.size());
  while (i < n) {
    if (is_separator(cps[i])) {
      ++i;
      continue;
    }
    uint32_t start = i;
    while (i < n && !is_separator(cps[i])) ++i;
    Word w;
    w.text = encode_range(cps, start, i);
    w.begin = joined_cps;
    w.end = joined_cps + (i - start);
    joined_cps = w.end;
    joined += w.text;
    words.push_back(std::move(w));
  }
  return words;
}

}  // namespace wwm::seg
