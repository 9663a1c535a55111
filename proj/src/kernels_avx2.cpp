// Copyright 2026 the wwm-pipeline authors.
// SPDX-License-Identifier: Apache-2.0
//
// AVX2 kernel variants. This translation unit is compiled with -mavx2; it
// must only be entered through the runtime dispatcher (src/kernels.cpp),
// which checks CPU support first.

#include "wwm/kernels.hpp"

#if defined(__x86_64__) || defined(_M_X64)

#include <immintrin.h>

namespace wwm::simd {
namespace {

inline __m256i broadcast_lut(const std::array<uint8_t, 16>& lut) {
  __m128i half = _mm_loadu_si128(reinterpret_cast<const __m128i*>(lut.data()));
  return _mm256_broadcastsi128_si256(half);
}

}  // namespace

size_t find_class_avx2(const uint8_t* data, size_t n, uint8_t mask) {
  const __m256i hi_lut = broadcast_lut(detail::kHiNibbleLut);
  const __m256i lo_lut = broadcast_lut(detail::kLoNibbleLut);
  const __m256i nib_mask = _mm256_set1_epi8(0x0F);
  const __m256i class_mask = _mm256_set1_epi8(char(mask));
  const __m256i zero = _mm256_setzero_si256();

  size_t i = 0;
  for (; i + 32 <= n; i += 32) {
    __m256i v = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(data + i));
    __m256i lo = _mm256_shuffle_epi8(lo_lut, _mm256_and_si256(v, nib_mask));
    __m256i hi = _mm256_shuffle_epi8(
        hi_lut, _mm256_and_si256(_mm256_srli_epi16(v, 4), nib_mask));
    __m256i cls = _mm256_and_si256(lo, hi);
    __m256i hit = _mm256_and_si256(cls, class_mask);
    // Lanes where hit == 0 compare equal; invert to get hit lanes.
    uint32_t zeros = uint32_t(_mm256_movemask_epi8(_mm256_cmpeq_epi8(hit, zero)));
    uint32_t hits = ~zeros;
    if (hits != 0) return i + size_t(__builtin_ctz(hits));
  }
  return i + find_class_scalar(data + i, n - i, mask);
}

size_t ascii_prefix_avx2(const uint8_t* data, size_t n) {
  size_t i = 0;
  for (; i + 32 <= n; i += 32) {
    __m256i v = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(data + i));
    uint32_t high = uint32_t(_mm256_movemask_epi8(v));
    if (high != 0) return i + size_t(__builtin_ctz(high));
  }
  return i + ascii_prefix_scalar(data + i, n - i);
}

}  // namespace wwm::simd

#endif  // x86_64
