// Copyright 2026 the wwm-pipeline authors.
// SPDX-License-Identifier: Apache-2.0
//
// Declarations for the generated Unicode property tables (see
// tools/gen_unicode_tables.py and src/unicode_tables.cpp). Consumers should
// use the classification helpers in wwm/unicode.hpp instead of touching the
// raw tables.

#pragma once

#include <cstddef>
#include <cstdint>

namespace wwm::uni::tables {

// Inclusive codepoint range.
struct Range32 {
  uint32_t lo;
  uint32_t hi;
};

// Inclusive codepoint range sharing one canonical combining class.
struct CccRange {
  uint32_t lo;
  uint32_t hi;
  uint8_t ccc;
};

// Full (recursively expanded) canonical decomposition: cp expands to
// kDecompPool[offset .. offset + len).
struct DecompEntry {
  uint32_t cp;
  uint32_t offset;
  uint32_t len;
};

// Primary composite: (starter << 32 | combining) -> composed codepoint.
struct CompEntry {
  uint64_t key;
  uint32_t composed;
};

// Simple one-to-one lowercase mapping.
struct CaseEntry {
  uint32_t cp;
  uint32_t lower;
};

extern const Range32 kMnRanges[];
extern const size_t kMnRangesCount;
extern const Range32 kPunctRanges[];
extern const size_t kPunctRangesCount;
extern const Range32 kZsRanges[];
extern const size_t kZsRangesCount;
extern const Range32 kCcRanges[];
extern const size_t kCcRangesCount;
extern const Range32 kCfRanges[];
extern const size_t kCfRangesCount;

extern const CccRange kCccRanges[];
extern const size_t kCccRangesCount;

extern const DecompEntry kDecomp[];
extern const size_t kDecompCount;
extern const uint32_t kDecompPool[];

extern const CompEntry kComp[];
extern const size_t kCompCount;

extern const CaseEntry kLower[];
extern const size_t kLowerCount;

}  // namespace wwm::uni::tables
