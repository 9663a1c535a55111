// Copyright 2026 the wwm-pipeline authors.
// SPDX-License-Identifier: Apache-2.0
//
// Minimal Unicode support for the corpus pipeline: strict UTF-8 codec,
// the handful of general-category predicates the tokenizer needs, and
// canonical normalization (NFD/NFC). Property data lives in generated
// tables (src/unicode_tables.cpp); Hangul decomposition/composition is
// algorithmic per the Unicode standard.

#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace wwm::uni {

inline constexpr uint32_t kMaxCodepoint = 0x10FFFF;

// Result of decoding one codepoint. len == 0 means the input is not valid
// UTF-8 at that position (truncated, overlong, surrogate, or out of range).
struct Decoded {
  uint32_t cp = 0;
  uint32_t len = 0;
};

// Decodes the codepoint starting at data[0]; examines at most n bytes.
Decoded decode_utf8(const char* data, size_t n);

// Appends cp to out as UTF-8. cp must be a valid scalar value.
void append_utf8(std::string& out, uint32_t cp);

// Number of bytes cp occupies in UTF-8.
uint32_t utf8_len(uint32_t cp);

// Decodes a whole string. Returns false (and stops) at the first invalid
// byte, reporting its offset; on success bad_offset is set to s.size().
bool decode_string(std::string_view s, std::vector<uint32_t>& out,
                   size_t& bad_offset);

// Encodes a codepoint sequence as UTF-8.
std::string encode_string(const std::vector<uint32_t>& cps);

// General-category predicates (from the generated tables).
bool is_mark_nonspacing(uint32_t cp);      // Mn
bool is_punctuation_category(uint32_t cp); // P*
bool is_space_separator(uint32_t cp);      // Zs
bool is_control_category(uint32_t cp);     // Cc
bool is_format_category(uint32_t cp);      // Cf

// Canonical combining class (0 for starters).
uint8_t combining_class(uint32_t cp);

// Simple one-to-one lowercase mapping (identity when none exists).
uint32_t simple_lower(uint32_t cp);

// Canonical decomposition (NFD) / canonical composition (NFC) over
// codepoint sequences.
std::vector<uint32_t> nfd(const std::vector<uint32_t>& cps);
std::vector<uint32_t> nfc(const std::vector<uint32_t>& cps);

// NFC over a UTF-8 string. The input must be valid UTF-8 (callers are
// expected to have validated it; invalid input triggers std::runtime_error).
std::string nfc_utf8(std::string_view s);

}  // namespace wwm::uni
