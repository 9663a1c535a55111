// Copyright 2026 the wwm-pipeline authors.
// SPDX-License-Identifier: Apache-2.0

#include "wwm/unicode.hpp"

#include <algorithm>
#include <stdexcept>

#include "wwm/unicode_tables.hpp"

namespace wwm::uni {
namespace {

using tables::Range32;

bool in_ranges(const Range32* ranges, size_t count, uint32_t cp) {
  auto* end = ranges + count;
  auto* it = std::lower_bound(ranges, end, cp, [](const Range32& r, uint32_t v) {
    return r.hi < v;
  });
  return it != end && cp >= it->lo;
}

// Hangul syllable composition constants (Unicode ch. 3.12).
constexpr uint32_t kHangulSBase = 0xAC00;
constexpr uint32_t kHangulLBase = 0x1100;
constexpr uint32_t kHangulVBase = 0x1161;
constexpr uint32_t kHangulTBase = 0x11A7;
constexpr uint32_t kHangulLCount = 19;
constexpr uint32_t kHangulVCount = 21;
constexpr uint32_t kHangulTCount = 28;
constexpr uint32_t kHangulNCount = kHangulVCount * kHangulTCount;  // 588
constexpr uint32_t kHangulSCount = kHangulLCount * kHangulNCount;  // 11172

bool hangul_decompose(uint32_t cp, std::vector<uint32_t>& out) {
  if (cp < kHangulSBase || cp >= kHangulSBase + kHangulSCount) return false;
  uint32_t s = cp - kHangulSBase;
  out.push_back(kHangulLBase + s / kHangulNCount);
  out.push_back(kHangulVBase + (s % kHangulNCount) / kHangulTCount);
  uint32_t t = s % kHangulTCount;
  if (t != 0) out.push_back(kHangulTBase + t);
  return true;
}

// Returns 0 when the pair does not compose.
uint32_t compose_pair(uint32_t a, uint32_t b) {
  // Hangul L+V and LV+T are algorithmic.
  if (a >= kHangulLBase && a < kHangulLBase + kHangulLCount &&
      b >= kHangulVBase && b < kHangulVBase + kHangulVCount) {
    return kHangulSBase +
           ((a - kHangulLBase) * kHangulVCount + (b - kHangulVBase)) *
               kHangulTCount;
  }
  if (a >= kHangulSBase && a < kHangulSBase + kHangulSCount &&
      (a - kHangulSBase) % kHangulTCount == 0 && b > kHangulTBase &&
      b < kHangulTBase + kHangulTCount) {
    return a + (b - kHangulTBase);
  }
  uint64_t key = (uint64_t(a) << 32) | b;
  auto* end = tables::kComp + tables::kCompCount;
  auto* it = std::lower_bound(
      tables::kComp, end, key,
      [](const tables::CompEntry& e, uint64_t k) { return e.key < k; });
  if (it != end && it->key == key) return it->composed;
  return 0;
}

void decompose_one(uint32_t cp, std::vector<uint32_t>& out) {
  if (hangul_decompose(cp, out)) return;
  auto* end = tables::kDecomp + tables::kDecompCount;
  auto* it = std::lower_bound(
      tables::kDecomp, end, cp,
      [](const tables::DecompEntry& e, uint32_t v) { return e.cp < v; });
  if (it != end && it->cp == cp) {
    for (uint32_t i = 0; i < it->len; ++i) {
      out.push_back(tables::kDecompPool[it->offset + i]);
    }
    return;
  }
  out.push_back(cp);
}

// Canonical ordering: stable-sort maximal runs of nonzero-ccc codepoints.
void canonical_order(std::vector<uint32_t>& cps) {
  size_t i = 0;
  while (i < cps.size()) {
    if (combining_class(cps[i]) == 0) {
      ++i;
      continue;
    }
    size_t j = i;
    while (j < cps.size() && combining_class(cps[j]) != 0) ++j;
    std::stable_sort(cps.begin() + i, cps.begin() + j,
                     [](uint32_t a, uint32_t b) {
                       return combining_class(a) < combining_class(b);
                     });
    i = j;
  }
}

}  // namespace

Decoded decode_utf8(const char* data, size_t n) {
  if (n == 0) return {};
  const auto* p = reinterpret_cast<const unsigned char*>(data);
  uint32_t b0 = p[0];
  if (b0 < 0x80) return {b0, 1};
  uint32_t len, cp, min_cp;
  if ((b0 & 0xE0) == 0xC0) {
    len = 2;
    cp = b0 & 0x1F;
    min_cp = 0x80;
  } else if ((b0 & 0xF0) == 0xE0) {
    len = 3;
    cp = b0 & 0x0F;
    min_cp = 0x800;
  } else if ((b0 & 0xF8) == 0xF0) {
    len = 4;
    cp = b0 & 0x07;
    min_cp = 0x10000;
  } else {
    return {};
  }
  if (n < len) return {};
  for (uint32_t i = 1; i < len; ++i) {
    if ((p[i] & 0xC0) != 0x80) return {};
    cp = (cp << 6) | (p[i] & 0x3F);
  }
  if (cp < min_cp || cp > kMaxCodepoint) return {};
  if (cp >= 0xD800 && cp <= 0xDFFF) return {};
  return {cp, len};
}

void append_utf8(std::string& out, uint32_t cp) {
  if (cp < 0x80) {
    out.push_back(char(cp));
  } else if (cp < 0x800) {
    out.push_back(char(0xC0 | (cp >> 6)));
    out.push_back(char(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(char(0xE0 | (cp >> 12)));
    out.push_back(char(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(char(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(char(0xF0 | (cp >> 18)));
    out.push_back(char(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(char(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(char(0x80 | (cp & 0x3F)));
  }
}

uint32_t utf8_len(uint32_t cp) {
  if (cp < 0x80) return 1;
  if (cp < 0x800) return 2;
  if (cp < 0x10000) return 3;
  return 4;
}

bool decode_string(std::string_view s, std::vector<uint32_t>& out,
                   size_t& bad_offset) {
  out.clear();
  out.reserve(s.size());
  size_t i = 0;
  while (i < s.size()) {
    Decoded d = decode_utf8(s.data() + i, s.size() - i);
    if (d.len == 0) {
      bad_offset = i;
      return false;
    }
    out.push_back(d.cp);
    i += d.len;
  }
  bad_offset = s.size();
  return true;
}

std::string encode_string(const std::vector<uint32_t>& cps) {
  std::string out;
  out.reserve(cps.size() * 3);
  for (uint32_t cp : cps) append_utf8(out, cp);
  return out;
}

bool is_mark_nonspacing(uint32_t cp) {
  return in_ranges(tables::kMnRanges, tables::kMnRangesCount, cp);
}

bool is_punctuation_category(uint32_t cp) {
  return in_ranges(tables::kPunctRanges, tables::kPunctRangesCount, cp);
}

bool is_space_separator(uint32_t cp) {
  return in_ranges(tables::kZsRanges, tables::kZsRangesCount, cp);
}

bool is_control_category(uint32_t cp) {
  return in_ranges(tables::kCcRanges, tables::kCcRangesCount, cp);
}

bool is_format_category(uint32_t cp) {
  return in_ranges(tables::kCfRanges, tables::kCfRangesCount, cp);
}

uint8_t combining_class(uint32_t cp) {
  auto* end = tables::kCccRanges + tables::kCccRangesCount;
  auto* it = std::lower_bound(
      tables::kCccRanges, end, cp,
      [](const tables::CccRange& r, uint32_t v) { return r.hi < v; });
  if (it != end && cp >= it->lo) return it->ccc;
  return 0;
}

uint32_t simple_lower(uint32_t cp) {
  auto* end = tables::kLower + tables::kLowerCount;
  auto* it = std::lower_bound(
      tables::kLower, end, cp,
      [](const tables::CaseEntry& e, uint32_t v) { return e.cp < v; });
  if (it != end && it->cp == cp) return it->lower;
  return cp;
}

std::vector<uint32_t> nfd(const std::vector<uint32_t>& cps) {
  std::vector<uint32_t> out;
  out.reserve(cps.size() + cps.size() / 4);
  for (uint32_t cp : cps) decompose_one(cp, out);
  canonical_order(out);
  return out;
}

std::vector<uint32_t> nfc(const std::vector<uint32_t>& cps) {
  std::vector<uint32_t> d = nfd(cps);
  std::vector<uint32_t> out;
  out.reserve(d.size());
  // UAX #15 canonical composition over the decomposed, ordered sequence.
  ptrdiff_t last_starter = -1;
  for (uint32_t cp : d) {
    uint8_t ccc = combining_class(cp);
    if (last_starter >= 0) {
      bool directly_after = size_t(last_starter) + 1 == out.size();
      bool blocked =
          !directly_after && (ccc == 0 || combining_class(out.back()) >= ccc);
      if (!blocked) {
        if (uint32_t composed = compose_pair(out[last_starter], cp)) {
          out[last_starter] = composed;
          continue;
        }
      }
    }
    out.push_back(cp);
    if (ccc == 0) last_starter = ptrdiff_t(out.size()) - 1;
  }
  return out;
}

std::string nfc_utf8(std::string_view s) {
  std::vector<uint32_t> cps;
  size_t bad = 0;
  if (!decode_string(s, cps, bad)) {
    throw std::runtime_error("nfc_utf8: invalid UTF-8 at byte offset " +
                             std::to_string(bad));
  }
  return encode_string(nfc(cps));
}

}  // namespace wwm::uni
