// Copyright 2026 the wwm-pipeline authors.
// SPDX-License-Identifier: Apache-2.0

#include "wwm/tokenizer.hpp"

#include "wwm/error.hpp"
#include "wwm/unicode.hpp"

namespace wwm::tok {

bool is_cjk_char(uint32_t cp) {
  return (cp >= 0x4E00 && cp <= 0x9FFF) ||    // CJK Unified Ideographs
         (cp >= 0x3400 && cp <= 0x4DBF) ||    // Extension A
         (cp >= 0x20000 && cp <= 0x2A6DF) ||  // Extension B
         (cp >= 0x2A700 && cp <= 0x2B73F) ||  // Extension C
         (cp >= 0x2B740 && cp <= 0x2B81F) ||  // Extension D
         (cp >= 0x2B820 && cp <= 0x2CEAF) ||  // Extension E
         (cp >= 0xF900 && cp <= 0xFAFF) ||    // Compatibility Ideographs
         (cp >= 0x2F800 && cp <= 0x2FA1F);    // Compatibility Supplement
}

bool is_whitespace_char(uint32_t cp) {
  if (cp == ' ' || cp == '\t' || cp == '\n' || cp == '\r') return true;
  return uni::is_space_separator(cp);
}

bool is_control_char(uint32_t cp) {
  if (cp == '\t' || cp == '\n' || cp == '\r') return false;
  return uni::is_control_category(cp) || uni::is_format_category(cp);
}

bool is_punctuation_char(uint32_t cp) {
  // ASCII symbol/punct ranges are treated as punctuation wholesale (this
  // includes characters like $ + ~ that Unicode puts in S* categories).
  if ((cp >= 33 && cp <= 47) || (cp >= 58 && cp <= 64) ||
      (cp >= 91 && cp <= 96) || (cp >= 123 && cp <= 126)) {
    return true;
  }
  return uni::is_punctuation_category(cp);
}

std::vector<BasicToken> Tokenizer::basic_tokenize(
    std::string_view sentence) const {
  std::vector<uint32_t> cps;
  size_t bad = 0;
  if (!uni::decode_string(sentence, cps, bad)) {
    throw_data("basic_tokenize: invalid UTF-8 at byte offset " +
               std::to_string(bad));
  }

  std::vector<BasicToken> out;
  BasicToken run;  // pending non-CJK, non-punct word run

  auto flush_run = [&] {
    if (!run.cps.empty()) {
      run.end = run.src_index.back() + 1;
      out.push_back(std::move(run));
      run = BasicToken{};
    }
  };
  auto push_single = [&](uint32_t cp, uint32_t idx) {
    BasicToken t;
    t.cps.push_back(cp);
    t.src_index.push_back(idx);
    t.begin = idx;
    t.end = idx + 1;
    out.push_back(std::move(t));
  };

  for (uint32_t i = 0; i < cps.size(); ++i) {
    uint32_t cp = cps[i];
    if (is_whitespace_char(cp) || is_control_char(cp) || cp == 0) {
      flush_run();
      continue;
    }
    if (options_.lowercase) cp = uni::simple_lower(cp);
    if (is_cjk_char(cp)) {
      flush_run();
      push_single(cp, i);
      continue;
    }
    if (is_punctuation_char(cp)) {
      flush_run();
      push_single(cp, i);
      continue;
    }
    if (run.cps.empty()) run.begin = i;
    run.cps.push_back(cp);
    run.src_index.push_back(i);
  }
  flush_run();

  if (options_.lowercase) {
    // Strip accents: NFD each token and drop nonspacing marks, keeping the
    // source-index mapping intact (a mark inherits nothing; letters map to
    // the codepoint they decomposed from).
    for (BasicToken& t : out) {
      std::vector<uint32_t> stripped;
      std::vector<uint32_t> stripped_src;
      for (size_t k = 0; k < t.cps.size(); ++k) {
        std::vector<uint32_t> d = uni::nfd({t.cps[k]});
        for (uint32_t cp : d) {
          if (uni::is_mark_nonspacing(cp)) continue;
          stripped.push_back(cp);
          stripped_src.push_back(t.src_index[k]);
        }
      }
      if (!stripped.empty()) {
        t.cps = std::move(stripped);
        t.src_index = std::move(stripped_src);
      }
      // A token that was nothing but combining marks keeps its original
      // content (dropping it entirely would desynchronize spans).
    }
  }
  return out;
}

void Tokenizer::wordpiece(const BasicToken& token, TokenSeq& out) const {
  const SpecialIds& sp = vocab_.specials();
  auto push_unk = [&] {
    out.push_back(Piece{"[UNK]", sp.unk, token.begin, token.end, false});
  };

  if (token.cps.size() > options_.max_wordpiece_chars) {
    push_unk();
    return;
  }

  // Byte offsets of each codepoint within the UTF-8 form of the token.
  std::string utf8;
  std::vector<size_t> byte_off(token.cps.size() + 1, 0);
  for (size_t i = 0; i < token.cps.size(); ++i) {
    uni::append_utf8(utf8, token.cps[i]);
    byte_off[i + 1] = utf8.size();
  }

  TokenSeq pieces;
  std::string scratch;
  size_t start = 0;
  while (start < token.cps.size()) {
    // Longest match first: try [start, end) for end = len .. start+1.
    scratch.clear();
    if (start > 0) scratch += "##";
    scratch.append(utf8, byte_off[start], utf8.size() - byte_off[start]);
    const size_t stem = start > 0 ? 2 : 0;

    size_t end = token.cps.size();
    int32_t id = -1;
    for (; end > start; --end) {
      std::string_view candidate(scratch.data(),
                                 stem + byte_off[end] - byte_off[start]);
      id = vocab_.id_of(candidate);
      if (id >= 0) break;
    }
    if (id < 0) {
      push_unk();
      return;
    }
    Piece p;
    p.text.assign(scratch, 0, stem + byte_off[end] - byte_off[start]);
    p.id = id;
    p.begin = token.src_index[start];
    p.end = token.src_index[end - 1] + 1;
    p.is_continuation = start > 0;
    pieces.push_back(std::move(p));
    start = end;
  }
  out.insert(out.end(), std::make_move_iterator(pieces.begin()),
             std::make_move_iterator(pieces.end()));
}

TokenSeq Tokenizer::tokenize(std::string_view sentence) const {
  TokenSeq out;
  for (const BasicToken& t : basic_tokenize(sentence)) {
    wordpiece(t, out);
  }
  return out;
}

}  // namespace wwm::tok
