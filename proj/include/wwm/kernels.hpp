// Copyright 2026 the wwm-pipeline authors.
// SPDX-License-Identifier: Apache-2.0
//
// Byte-scanning kernels for the hot loops of the text pipeline (tag/control
// scanning in the cleaner, ASCII fast paths in the tokenizer). Each kernel
// has a scalar reference implementation and an AVX2 variant; the dispatched
// entry points pick one at runtime from CPU features. Set WWM_FORCE_SCALAR=1
// to pin the scalar variants (the two are equivalence-tested byte-for-byte).
//
// Byte classes are defined as (high-nibble set x low-nibble set) rectangles
// so the AVX2 variant can classify 32 bytes at a time with two PSHUFB nibble
// lookups, and the scalar table is derived from the same rectangles.

#pragma once

#include <array>
#include <cstddef>
#include <cstdint>

namespace wwm::simd {

// Bits assigned to byte classes. A byte may carry several bits (e.g. '\t'
// is both kControlC0 and kTab).
enum ByteClass : uint8_t {
  kControlC0 = 1u << 0,  // 0x00..0x1F (includes \t \n \r)
  kDelete = 1u << 1,     // 0x7F
  kTagOpen = 1u << 2,    // '<'
  kSpace = 1u << 3,      // ' '
  kTab = 1u << 4,        // '\t'
  kCarriageRet = 1u << 5,// '\r'
  kNewline = 1u << 6,    // '\n'
  kNonAscii = 1u << 7,   // 0x80..0xFF
};

// Everything the text cleaner has to stop for; plain printable ASCII is
// copied through in bulk.
inline constexpr uint8_t kCleanerStopMask =
    kControlC0 | kDelete | kTagOpen | kSpace | kNonAscii;

namespace detail {

struct ClassRect {
  uint8_t bits;
  uint16_t hi_set;  // bitset over high nibbles 0..15
  uint16_t lo_set;  // bitset over low nibbles 0..15
};

inline constexpr ClassRect kClassRects[] = {
    {kControlC0, 0x0003, 0xFFFF},   // hi in {0,1}
    {kDelete, 1u << 7, 1u << 0xF},  // 0x7F
    {kTagOpen, 1u << 3, 1u << 0xC}, // 0x3C
    {kSpace, 1u << 2, 1u << 0x0},   // 0x20
    {kTab, 1u << 0, 1u << 0x9},     // 0x09
    {kCarriageRet, 1u << 0, 1u << 0xD},
    {kNewline, 1u << 0, 1u << 0xA},
    {kNonAscii, 0xFF00, 0xFFFF},    // hi in {8..15}
};

constexpr std::array<uint8_t, 16> make_nibble_lut(bool high) {
  std::array<uint8_t, 16> lut{};
  for (int nib = 0; nib < 16; ++nib) {
    for (const ClassRect& r : kClassRects) {
      uint16_t set = high ? r.hi_set : r.lo_set;
      if (set & (1u << nib)) lut[nib] |= r.bits;
    }
  }
  return lut;
}

constexpr std::array<uint8_t, 256> make_class_table() {
  std::array<uint8_t, 256> table{};
  auto hi = make_nibble_lut(true);
  auto lo = make_nibble_lut(false);
  for (int b = 0; b < 256; ++b) {
    table[b] = uint8_t(hi[b >> 4] & lo[b & 0x0F]);
  }
  return table;
}

inline constexpr std::array<uint8_t, 16> kHiNibbleLut = make_nibble_lut(true);
inline constexpr std::array<uint8_t, 16> kLoNibbleLut = make_nibble_lut(false);

}  // namespace detail

inline constexpr std::array<uint8_t, 256> kByteClassTable =
    detail::make_class_table();

inline uint8_t classify_byte(uint8_t b) { return kByteClassTable[b]; }

// --- kernel variants -------------------------------------------------------

// Index of the first byte in [data, data+n) whose class intersects mask,
// or n when none does.
size_t find_class_scalar(const uint8_t* data, size_t n, uint8_t mask);

// Length of the leading run of ASCII (< 0x80) bytes.
size_t ascii_prefix_scalar(const uint8_t* data, size_t n);

#if defined(__x86_64__) || defined(_M_X64)
size_t find_class_avx2(const uint8_t* data, size_t n, uint8_t mask);
size_t ascii_prefix_avx2(const uint8_t* data, size_t n);
#endif

// --- dispatched entry points ------------------------------------------------

size_t find_class(const uint8_t* data, size_t n, uint8_t mask);
size_t ascii_prefix(const uint8_t* data, size_t n);

inline size_t find_class(const char* data, size_t n, uint8_t mask) {
  return find_class(reinterpret_cast<const uint8_t*>(data), n, mask);
}
inline size_t ascii_prefix(const char* data, size_t n) {
  return ascii_prefix(reinterpret_cast<const uint8_t*>(data), n);
}

// Name of the selected variant ("avx2" or "scalar"), for logs and tests.
const char* active_kernel();

}  // namespace wwm::simd
