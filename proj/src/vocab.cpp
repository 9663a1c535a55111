// Copyright 2026 the wwm-pipeline authors.
// SPDX-License-Identifier: Apache-2.0

#include "wwm/vocab.hpp"

#include <fstream>
#include <sstream>

#include "wwm/error.hpp"

namespace wwm::tok {

uint64_t fnv1a64(std::string_view bytes) {
  uint64_t h = 0xCBF29CE484222325ULL;
  for (unsigned char b : bytes) {
    h ^= b;
    h *= 0x100000001B3ULL;
  }
  return h;
}

Vocab Vocab::from_text(std::string_view text) {
  Vocab v;
  v.fingerprint_ = fnv1a64(text);

  size_t line_start = 0;
  size_t line_no = 0;
  while (line_start < text.size()) {
    size_t nl = text.find('\n', line_start);
    std::string_view line =
        nl == std::string_view::npos
            ? text.substr(line_start)
            : text.substr(line_start, nl - line_start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);

    if (line.empty()) {
      // A final newline is fine; an empty token mid-file is not.
      bool at_eof = nl == std::string_view::npos || nl + 1 >= text.size();
      if (!at_eof) {
        throw_data("vocab: empty token at line " + std::to_string(line_no + 1));
      }
    } else {
      auto [it, inserted] =
          v.index_.emplace(std::string(line), int32_t(v.tokens_.size()));
      if (!inserted) {
        throw_data("vocab: duplicate token '" + std::string(line) +
                   "' at line " + std::to_string(line_no + 1));
      }
      v.tokens_.emplace_back(line);
    }
    if (nl == std::string_view::npos) break;
    line_start = nl + 1;
    ++line_no;
  }

  if (v.tokens_.empty()) throw_data("vocab: file contains no tokens");

  v.specials_.pad = v.id_of("[PAD]");
  v.specials_.unk = v.id_of("[UNK]");
  v.specials_.cls = v.id_of("[CLS]");
  v.specials_.sep = v.id_of("[SEP]");
  v.specials_.mask = v.id_of("[MASK]");
  const char* names[] = {"[PAD]", "[UNK]", "[CLS]", "[SEP]", "[MASK]"};
  const int32_t ids[] = {v.specials_.pad, v.specials_.unk, v.specials_.cls,
                         v.specials_.sep, v.specials_.mask};
  for (size_t i = 0; i < 5; ++i) {
    if (ids[i] < 0) {
      throw_data(std::string("vocab: missing required special token ") +
                 names[i]);
    }
  }
  return v;
}

Vocab Vocab::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw_io("vocab: cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw_io("vocab: read failure on '" + path + "'");
  return from_text(buf.str());
}

}  // namespace wwm::tok
