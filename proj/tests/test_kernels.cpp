// Copyright 2026 the wwm-pipeline authors.
// SPDX-License-Identifier: Apache-2.0
//
// The scalar kernels define the semantics; the AVX2 variants must agree
// byte-for-byte on every input, including lengths around the vector width
// and unaligned starting offsets.

#include <cstring>
#include <string>
#include <vector>

#include <doctest.h>

#include "wwm/kernels.hpp"
#include "wwm/rng.hpp"

using namespace wwm;

namespace {

// Independent statement of the byte classes, written directly from their
// definitions rather than via the nibble-rectangle machinery.
uint8_t classify_reference(uint8_t b) {
  uint8_t bits = 0;
  if (b <= 0x1F) bits |= simd::kControlC0;
  if (b == 0x7F) bits |= simd::kDelete;
  if (b == '<') bits |= simd::kTagOpen;
  if (b == ' ') bits |= simd::kSpace;
  if (b == '\t') bits |= simd::kTab;
  if (b == '\r') bits |= simd::kCarriageRet;
  if (b == '\n') bits |= simd::kNewline;
  if (b >= 0x80) bits |= simd::kNonAscii;
  return bits;
}

size_t find_class_reference(const uint8_t* data, size_t n, uint8_t mask) {
  for (size_t i = 0; i < n; ++i) {
    if (classify_reference(data[i]) & mask) return i;
  }
  return n;
}

std::vector<uint8_t> random_buffer(rng::Rng& rng, size_t n, bool ascii_heavy) {
  std::vector<uint8_t> buf(n);
  for (auto& b : buf) {
    if (ascii_heavy && rng.next_below(8) != 0) {
      b = uint8_t(0x21 + rng.next_below(0x5E - 0x21));  // printable, no space
    } else {
      b = uint8_t(rng.next_below(256));
    }
  }
  return buf;
}

}  // namespace

TEST_SUITE("kernels") {

TEST_CASE("class table matches the per-byte definition for all 256 bytes") {
  for (int b = 0; b < 256; ++b) {
    CAPTURE(b);
    CHECK(simd::classify_byte(uint8_t(b)) == classify_reference(uint8_t(b)));
  }
}

TEST_CASE("nibble LUTs reproduce the class table") {
  for (int b = 0; b < 256; ++b) {
    uint8_t via_luts = uint8_t(simd::detail::kHiNibbleLut[b >> 4] &
                               simd::detail::kLoNibbleLut[b & 0x0F]);
    CHECK(via_luts == simd::kByteClassTable[size_t(b)]);
  }
}

TEST_CASE("scalar find_class agrees with the reference loop") {
  rng::Rng rng(0xC0FFEE);
  const uint8_t masks[] = {simd::kCleanerStopMask, simd::kTagOpen,
                           simd::kNewline | simd::kCarriageRet, 0xFF, 0x01};
  for (int iter = 0; iter < 200; ++iter) {
    size_t n = rng.next_below(300);
    auto buf = random_buffer(rng, n, iter % 2 == 0);
    for (uint8_t mask : masks) {
      CHECK(simd::find_class_scalar(buf.data(), n, mask) ==
            find_class_reference(buf.data(), n, mask));
    }
  }
}

TEST_CASE("scalar ascii_prefix counts leading ASCII bytes") {
  const uint8_t buf[] = {'a', 'b', 'c', 0x7F, 0x80, 'd'};
  CHECK(simd::ascii_prefix_scalar(buf, 6) == 4);
  CHECK(simd::ascii_prefix_scalar(buf, 4) == 4);
  CHECK(simd::ascii_prefix_scalar(buf, 0) == 0);
  const uint8_t all_high[] = {0xE4, 0xBD, 0xA0};
  CHECK(simd::ascii_prefix_scalar(all_high, 3) == 0);
}

#if defined(__x86_64__) || defined(_M_X64)
TEST_CASE("avx2 variants match scalar on random buffers, lengths, offsets") {
  if (!__builtin_cpu_supports("avx2")) {
    MESSAGE("avx2 not available on this host; skipping equivalence run");
    return;
  }
  rng::Rng rng(0xBADC0DE);
  for (int iter = 0; iter < 400; ++iter) {
    // Lengths clustered around the 32-byte vector width and its multiples.
    size_t base = size_t(rng.next_below(4)) * 32;
    size_t n = base + rng.next_below(40);
    auto storage = random_buffer(rng, n + 64, iter % 3 != 0);
    size_t offset = rng.next_below(32);
    const uint8_t* p = storage.data() + offset;

    uint8_t mask = uint8_t(1u << rng.next_below(8));
    if (iter % 5 == 0) mask = simd::kCleanerStopMask;

    CHECK(simd::find_class_avx2(p, n, mask) ==
          simd::find_class_scalar(p, n, mask));
    CHECK(simd::ascii_prefix_avx2(p, n) == simd::ascii_prefix_scalar(p, n));
  }
}

TEST_CASE("avx2 finds a lone stop byte at every position of a long buffer") {
  if (!__builtin_cpu_supports("avx2")) return;
  std::vector<uint8_t> buf(131, 'x');
  for (size_t pos = 0; pos < buf.size(); ++pos) {
    buf[pos] = '<';
    CHECK(simd::find_class_avx2(buf.data(), buf.size(), simd::kTagOpen) == pos);
    buf[pos] = 'x';
  }
  CHECK(simd::find_class_avx2(buf.data(), buf.size(), simd::kTagOpen) ==
        buf.size());
}
#endif

TEST_CASE("dispatched entry points answer like the scalar reference") {
  std::string text = "plain text <tag> \xE4\xBD\xA0\xE5\xA5\xBD and more";
  size_t n = text.size();
  CHECK(simd::find_class(text.data(), n, simd::kTagOpen) ==
        simd::find_class_scalar(reinterpret_cast<const uint8_t*>(text.data()),
                                n, simd::kTagOpen));
  CHECK(simd::ascii_prefix(text.data(), n) ==
        simd::ascii_prefix_scalar(reinterpret_cast<const uint8_t*>(text.data()),
                                  n));
  // Whichever variant the dispatcher picked, it must be one of the two.
  std::string name = simd::active_kernel();
  CHECK((name == "avx2" || name == "scalar"));
}

}  // TEST_SUITE
