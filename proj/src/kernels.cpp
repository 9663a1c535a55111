// Copyright 2026 the wwm-pipeline authors.
// SPDX-License-Identifier: Apache-2.0
//
// Runtime dispatch for the byte-scanning kernels.

#include "wwm/kernels.hpp"

#include <cstdlib>
#include <cstring>

namespace wwm::simd {
namespace {

bool force_scalar() {
  const char* v = std::getenv("WWM_FORCE_SCALAR");
  return v != nullptr && std::strcmp(v, "0") != 0;
}

bool use_avx2() {
#if defined(__x86_64__) || defined(_M_X64)
  return !force_scalar() && __builtin_cpu_supports("avx2");
#else
  return false;
#endif
}

struct Dispatch {
  size_t (*find_class)(const uint8_t*, size_t, uint8_t);
  size_t (*ascii_prefix)(const uint8_t*, size_t);
  const char* name;
};

Dispatch resolve() {
#if defined(__x86_64__) || defined(_M_X64)
  if (use_avx2()) return {find_class_avx2, ascii_prefix_avx2, "avx2"};
#endif
  return {find_class_scalar, ascii_prefix_scalar, "scalar"};
}

const Dispatch& dispatch() {
  static const Dispatch d = resolve();
  return d;
}

}  // namespace

size_t find_class(const uint8_t* data, size_t n, uint8_t mask) {
  return dispatch().find_class(data, n, mask);
}

size_t ascii_prefix(const uint8_t* data, size_t n) {
  return dispatch().ascii_prefix(data, n);
}

const char* active_kernel() { return dispatch().name; }

}  // namespace wwm::simd
