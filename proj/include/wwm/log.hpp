// Copyright 2026 the wwm-pipeline authors.
// SPDX-License-Identifier: Apache-2.0
//
// Tiny stderr logger. The level is read once from the WWM_LOG environment
// variable: error | warn (default) | info | debug.

#pragma once

#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <cstring>

namespace wwm::log {

enum Level { kError = 0, kWarn = 1, kInfo = 2, kDebug = 3 };

inline Level level() {
  static const Level lvl = [] {
    const char* v = std::getenv("WWM_LOG");
    if (v == nullptr) return kWarn;
    if (std::strcmp(v, "error") == 0) return kError;
    if (std::strcmp(v, "warn") == 0) return kWarn;
    if (std::strcmp(v, "info") == 0) return kInfo;
    if (std::strcmp(v, "debug") == 0) return kDebug;
    return kWarn;
  }();
  return lvl;
}

inline void vlogf(Level lvl, const char* tag, const char* fmt, va_list ap) {
  if (lvl > level()) return;
  std::fprintf(stderr, "wwm: [%s] ", tag);
  std::vfprintf(stderr, fmt, ap);
  std::fputc('\n', stderr);
}

#define WWM_DEFINE_LOG_FN(name, lvl, tag)                    \
  inline void name(const char* fmt, ...) {                   \
    va_list ap;                                              \
    va_start(ap, fmt);                                       \
    ::wwm::log::vlogf(lvl, tag, fmt, ap);                    \
    va_end(ap);                                              \
  }

WWM_DEFINE_LOG_FN(error, kError, "error")
WWM_DEFINE_LOG_FN(warn, kWarn, "warn")
WWM_DEFINE_LOG_FN(info, kInfo, "info")
WWM_DEFINE_LOG_FN(debug, kDebug, "debug")

#undef WWM_DEFINE_LOG_FN

}  // namespace wwm::log
