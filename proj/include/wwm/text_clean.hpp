// Copyright 2026 the wwm-pipeline authors.
// SPDX-License-Identifier: Apache-2.0
//
// Corpus ingestion: cleaning of raw wiki-style extracted text, sentence
// splitting, and (de)serialization of the canonical corpus format -- one
// sentence per line, documents separated by a single blank line, trailing
// newline at end of file.

#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace wwm::text {

// One raw input document prior to cleaning.
struct RawDocument {
  std::string id;
  std::string body;
};

// Counters accumulated by clean_text.
struct CleanCounters {
  uint64_t tags_stripped = 0;
  uint64_t control_removed = 0;
};

// Cleans one raw document body:
//   * markup tag spans `<...>` are removed (single left-to-right scan, no
//     nesting; an unclosed `<` is kept literally),
//   * control and format characters are removed (newlines survive as line
//     structure; tab/CR count as whitespace),
//   * whitespace runs collapse to a single space -- or a single newline if
//     the run contained one -- with no leading or trailing whitespace,
//   * the result is NFC-normalized.
// The transform deletes and normalizes only (no data invention) and it is
// idempotent. Invalid UTF-8 raises wwm::Error(kData) with the byte offset.
std::string clean_text(std::string_view raw, CleanCounters* counters = nullptr);

// Splits cleaned text into sentences on the CJK sentence-final set
// {U+3002, U+FF01, U+FF1F, U+FF1B} and on newlines. Terminators stay
// attached to their sentence; the Latin '.' is intentionally not a
// splitter (it would shred web text full of abbreviations and numbers).
// Whitespace-only segments are dropped.
std::vector<std::string> split_sentences(std::string_view cleaned);

// Splits raw file content into documents. Files produced by wiki
// extraction tools wrap each article in <doc id="..."> ... </doc>; when no
// such markers are present the whole file is one document with fallback_id.
std::vector<RawDocument> extract_documents(std::string_view file_content,
                                           std::string_view fallback_id);

// Canonical corpus serialization. Documents with no sentences are skipped.
std::string to_corpus(const std::vector<std::vector<std::string>>& documents);

// Parses the canonical corpus format back into documents of sentences.
// Tolerates repeated blank lines; never returns empty documents.
std::vector<std::vector<std::string>> parse_corpus(std::string_view corpus);

}  // namespace wwm::text
