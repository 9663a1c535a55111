// Copyright 2026 the wwm-pipeline authors.
// SPDX-License-Identifier: Apache-2.0
//
// WordPiece vocabulary: one token per line, id = zero-based line index.
// The five special tokens [PAD] [UNK] [CLS] [SEP] [MASK] must be present.

#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace wwm::tok {

// 64-bit FNV-1a over raw bytes; used to fingerprint the vocab file so
// record files can name the vocabulary they were built against.
uint64_t fnv1a64(std::string_view bytes);

struct SpecialIds {
  int32_t pad = -1;
  int32_t unk = -1;
  int32_t cls = -1;
  int32_t sep = -1;
  int32_t mask = -1;
};

class Vocab {
 public:
  // Parses vocab file content. Rejects (wwm::Error, kData): empty input,
  // duplicate tokens (reporting the line), interior empty lines, missing
  // special tokens. Lines are LF- or CRLF-terminated.
  static Vocab from_text(std::string_view text);

  // Reads and parses path; fingerprint() is computed over the file bytes.
  static Vocab load(const std::string& path);

  int32_t size() const { return int32_t(tokens_.size()); }
  const std::string& token(int32_t id) const { return tokens_[size_t(id)]; }

  // Id for a surface form, or -1 when absent.
  int32_t id_of(std::string_view token) const {
    auto it = index_.find(token);
    return it == index_.end() ? -1 : it->second;
  }
  bool contains(std::string_view token) const { return id_of(token) >= 0; }

  const SpecialIds& specials() const { return specials_; }
  bool is_special(int32_t id) const {
    return id == specials_.pad || id == specials_.unk || id == specials_.cls ||
           id == specials_.sep || id == specials_.mask;
  }

  uint64_t fingerprint() const { return fingerprint_; }

 private:
  struct StringHash {
    using is_transparent = void;
    size_t operator()(std::string_view s) const {
      return std::hash<std::string_view>{}(s);
    }
  };

  std::vector<std::string> tokens_;
  std::unordered_map<std::string, int32_t, StringHash, std::equal_to<>> index_;
  SpecialIds specials_;
  uint64_t fingerprint_ = 0;
};

}  // namespace wwm::tok
