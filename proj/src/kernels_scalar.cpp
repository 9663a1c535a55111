// Copyright 2026 the wwm-pipeline authors.
// SPDX-License-Identifier: Apache-2.0
//
// Scalar reference kernels. These define the semantics; the SIMD variants
// must match them byte-for-byte (see tests/test_kernels.cpp).

#include "wwm/kernels.hpp"

namespace wwm::simd {

size_t find_class_scalar(const uint8_t* data, size_t n, uint8_t mask) {
  for (size_t i = 0; i < n; ++i) {
    if (kByteClassTable[data[i]] & mask) return i;
  }
  return n;
}

size_t ascii_prefix_scalar(const uint8_t* data, size_t n) {
  for (size_t i = 0; i < n; ++i) {
    if (data[i] >= 0x80) return i;
  }
  return n;
}

}  // namespace wwm::simd
