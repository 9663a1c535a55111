// Copyright 2026 the wwm-pipeline authors.
// SPDX-License-Identifier: Apache-2.0

#include "wwm/text_clean.hpp"

#include <cstring>

#include "wwm/error.hpp"
#include "wwm/kernels.hpp"
#include "wwm/unicode.hpp"

namespace wwm::text {
namespace {

// Pending-whitespace state: a run of whitespace is emitted as one space, or
// as one newline if the run contained a newline (line structure is what the
// sentence splitter later splits on).
enum PendingWs : uint8_t { kNone = 0, kSpacePending = 1, kNewlinePending = 2 };

void note_ws(uint8_t& pending, uint8_t kind) {
  if (kind > pending) pending = kind;
}

void flush_ws(std::string& out, uint8_t& pending) {
  if (pending != kNone && !out.empty()) {
    out.push_back(pending == kNewlinePending ? '\n' : ' ');
  }
  pending = kNone;
}

}  // namespace

std::string clean_text(std::string_view raw, CleanCounters* counters) {
  std::string out;
  out.reserve(raw.size());
  CleanCounters local;
  uint8_t pending = kNone;
  bool non_ascii = false;

  const char* data = raw.data();
  size_t n = raw.size();
  size_t i = 0;
  while (i < n) {
    // Bulk-copy printable ASCII up to the next byte the cleaner cares about.
    size_t run = simd::find_class(data + i, n - i, simd::kCleanerStopMask);
    if (run > 0) {
      flush_ws(out, pending);
      out.append(data + i, run);
      i += run;
      if (i >= n) break;
    }

    unsigned char b = static_cast<unsigned char>(data[i]);
    if (b == '<') {
      // Non-nesting tag scan: drop through the next '>', or keep a lone '<'.
      const void* close = std::memchr(data + i + 1, '>', n - i - 1);
      if (close != nullptr) {
        i = size_t(static_cast<const char*>(close) - data) + 1;
        ++local.tags_stripped;
      } else {
        flush_ws(out, pending);
        out.push_back('<');
        ++i;
      }
    } else if (b == '\n') {
      note_ws(pending, kNewlinePending);
      ++i;
    } else if (b == ' ' || b == '\t' || b == '\r') {
      note_ws(pending, kSpacePending);
      ++i;
    } else if (b < 0x20 || b == 0x7F) {
      ++local.control_removed;
      ++i;
    } else {
      // Non-ASCII: decode and classify the codepoint.
      uni::Decoded d = uni::decode_utf8(data + i, n - i);
      if (d.len == 0) {
        throw_data("clean_text: invalid UTF-8 at byte offset " +
                   std::to_string(i));
      }
      if (uni::is_space_separator(d.cp)) {
        note_ws(pending, kSpacePending);
      } else if (uni::is_control_category(d.cp) || uni::is_format_category(d.cp)) {
        ++local.control_removed;
      } else {
        flush_ws(out, pending);
        non_ascii = true;
        out.append(data + i, d.len);
      }
      i += d.len;
    }
  }

  if (counters != nullptr) {
    counters->tags_stripped += local.tags_stripped;
    counters->control_removed += local.control_removed;
  }
  // ASCII is closed under NFC; skip the pass when nothing needs it.
  if (!non_ascii) return out;
  return uni::nfc_utf8(out);
}

std::vector<std::string> split_sentences(std::string_view cleaned) {
  std::vector<std::string> sentences;
  std::string current;

  auto flush = [&] {
    // Trim the single spaces cleaning may have left at the seams.
    size_t b = current.find_first_not_of(' ');
    if (b == std::string::npos) {
      current.clear();
      return;
    }
    size_t e = current.find_last_not_of(' ');
    sentences.emplace_back(current.substr(b, e - b + 1));
    current.clear();
  };

  const char* data = cleaned.data();
  size_t n = cleaned.size();
  size_t i = 0;
  while (i < n) {
    unsigned char b = static_cast<unsigned char>(data[i]);
    if (b == '\n') {
      flush();
      ++i;
      continue;
    }
    if (b < 0x80) {
      current.push_back(char(b));
      ++i;
      continue;
    }
    uni::Decoded d = uni::decode_utf8(data + i, n - i);
    if (d.len == 0) {
      throw_data("split_sentences: invalid UTF-8 at byte offset " +
                 std::to_string(i));
    }
    current.append(data + i, d.len);
    i += d.len;
    // Sentence-final: 。 ！ ？ ； (terminator stays attached).
    if (d.cp == 0x3002 || d.cp == 0xFF01 || d.cp == 0xFF1F || d.cp == 0xFF1B) {
      flush();
    }
  }
  flush();
  return sentences;
}

std::vector<RawDocument> extract_documents(std::string_view file_content,
                                           std::string_view fallback_id) {
  std::vector<RawDocument> docs;
  if (file_content.find("<doc") == std::string_view::npos) {
    if (!file_content.empty()) {
      docs.push_back({std::string(fallback_id), std::string(file_content)});
    }
    return docs;
  }

  RawDocument current;
  bool in_doc = false;
  size_t line_start = 0;
  size_t doc_ordinal = 0;
  while (line_start <= file_content.size()) {
    size_t nl = file_content.find('\n', line_start);
    std::string_view line = file_content.substr(
        line_start, nl == std::string_view::npos ? std::string_view::npos
                                                 : nl - line_start);
    if (line.rfind("<doc", 0) == 0) {
      in_doc = true;
      current = RawDocument{};
      size_t id_pos = line.find("id=\"");
      if (id_pos != std::string_view::npos) {
        size_t id_end = line.find('"', id_pos + 4);
        if (id_end != std::string_view::npos) {
          current.id = std::string(line.substr(id_pos + 4, id_end - id_pos - 4));
        }
      }
      if (current.id.empty()) {
        current.id = std::string(fallback_id) + "#" + std::to_string(doc_ordinal);
      }
    } else if (line.rfind("</doc>", 0) == 0) {
      if (in_doc) {
        docs.push_back(std::move(current));
        ++doc_ordinal;
        in_doc = false;
      }
    } else if (in_doc) {
      current.body.append(line);
      current.body.push_back('\n');
    }
    if (nl == std::string_view::npos) break;
    line_start = nl + 1;
  }
  return docs;
}

std::string to_corpus(const std::vector<std::vector<std::string>>& documents) {
  std::string out;
  bool first = true;
  for (const auto& sentences : documents) {
    if (sentences.empty()) continue;
    if (!first) out.push_back('\n');
    first = false;
    for (const auto& sentence : sentences) {
      out.append(sentence);
      out.push_back('\n');
    }
  }
  return out;
}

std::vector<std::vector<std::string>> parse_corpus(std::string_view corpus) {
  std::vector<std::vector<std::string>> docs;
  std::vector<std::string> current;
  size_t line_start = 0;
  while (line_start <= corpus.size()) {
    size_t nl = corpus.find('\n', line_start);
    std::string_view line = corpus.substr(
        line_start,
        nl == std::string_view::npos ? std::string_view::npos : nl - line_start);
    if (line_start >= corpus.size() && line.empty()) break;
    if (line.empty()) {
      if (!current.empty()) {
        docs.push_back(std::move(current));
        current.clear();
      }
    } else {
      current.emplace_back(line);
    }
    if (nl == std::string_view::npos) break;
    line_start = nl + 1;
  }
  if (!current.empty()) docs.push_back(std::move(current));
  return docs;
}

}  // namespace wwm::text
