// Copyright 2026 the wwm-pipeline authors.
// SPDX-License-Identifier: Apache-2.0
//
// BERT-style tokenization. basic_tokenize isolates every CJK ideograph and
// every punctuation character as its own token and splits everything else
// on whitespace; wordpiece then applies greedy longest-match-first subword
// segmentation with the "##" continuation convention. All spans are
// codepoint offsets into the (already NFC-normalized) input sentence, which
// is what word-unit alignment keys on.

#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "wwm/vocab.hpp"

namespace wwm::tok {

// True for the CJK ideograph blocks that are tokenized one character at a
// time: Unified Ideographs, Extension A, Extensions B..F, and the
// Compatibility Ideographs blocks.
bool is_cjk_char(uint32_t cp);

// Whitespace for tokenization purposes: ASCII space/tab/newline/CR plus Zs.
bool is_whitespace_char(uint32_t cp);

// Control/format characters (minus tab/newline/CR) act as separators too.
bool is_control_char(uint32_t cp);

// ASCII symbol ranges plus Unicode general category P*.
bool is_punctuation_char(uint32_t cp);

// Output of basic_tokenize: one whitespace-free span of the sentence.
struct BasicToken {
  std::vector<uint32_t> cps;        // processed codepoints (post lower/strip)
  std::vector<uint32_t> src_index;  // cps[i] came from sentence codepoint src_index[i]
  uint32_t begin = 0;               // codepoint span in the source sentence
  uint32_t end = 0;
};

// One WordPiece. text is the vocab surface form ("##"-prefixed when it
// continues a word); begin/end is the codepoint span in the source sentence.
struct Piece {
  std::string text;
  int32_t id = -1;
  uint32_t begin = 0;
  uint32_t end = 0;
  bool is_continuation = false;
};

using TokenSeq = std::vector<Piece>;

struct TokenizerOptions {
  // Lowercase + strip accents (the reference multilingual/English behavior).
  // The Chinese pipeline runs with false: CJK has no case and the released
  // vocabularies keep accents.
  bool lowercase = false;
  // Words longer than this many codepoints become [UNK] outright.
  uint32_t max_wordpiece_chars = 100;
};

class Tokenizer {
 public:
  Tokenizer(const Vocab& vocab, TokenizerOptions options = {})
      : vocab_(vocab), options_(options) {}

  // Splits a sentence into basic tokens. Spans tile the sentence's
  // non-separator codepoints in order. Invalid UTF-8 raises kData.
  std::vector<BasicToken> basic_tokenize(std::string_view sentence) const;

  // Greedy longest-match-first WordPiece of one basic token. Appends to
  // out; emits a single [UNK] piece when the token cannot be segmented or
  // exceeds max_wordpiece_chars.
  void wordpiece(const BasicToken& token, TokenSeq& out) const;

  // basic_tokenize + wordpiece over a whole sentence.
  TokenSeq tokenize(std::string_view sentence) const;

  const Vocab& vocab() const { return vocab_; }
  const TokenizerOptions& options() const { return options_; }

 private:
  const Vocab& vocab_;
  TokenizerOptions options_;
};

}  // namespace wwm::tok
