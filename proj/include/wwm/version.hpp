// Copyright 2026 the wwm-pipeline authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

namespace wwm {

inline constexpr const char* kVersion = "1.0.0";

}  // namespace wwm
