// Copyright 2026 the wwm-pipeline authors.
// SPDX-License-Identifier: Apache-2.0
//
// Integrity statistics over a record file: masking rates, action mix,
// whole-word atomicity audit, [UNK] and script composition, NSP balance.
// The report is a pure function of the file bytes (plus the sidecar, when
// given): accumulation uses integer counters only, partitioned over record
// batches and merged by summation, so thread count cannot change results.

#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "wwm/builder.hpp"
#include "wwm/vocab.hpp"

namespace wwm::stats {

struct StatsReport {
  uint64_t instance_count = 0;

  uint64_t unpadded_positions = 0;
  uint32_t max_unpadded_len = 0;
  double mean_unpadded_len = 0.0;

  uint64_t masked_positions = 0;
  uint64_t nonspecial_positions = 0;  // unpadded minus [CLS]/[SEP]
  // Masked positions over all unpadded positions -- the denominator the
  // masking budget is computed from.
  double masked_rate = 0.0;
  // Same numerator over maskable (non-[CLS]/[SEP]) positions only.
  double masked_rate_nonspecial = 0.0;

  // From the sidecar (zero / false when absent).
  bool has_sidecar = false;
  uint64_t action_mask = 0;
  uint64_t action_random = 0;
  uint64_t action_keep = 0;
  double mask_action_ratio = 0.0;
  double random_action_ratio = 0.0;
  double keep_action_ratio = 0.0;
  uint64_t atomicity_violations = 0;

  uint64_t unk_tokens = 0;
  double unk_rate = 0.0;
  uint64_t cjk_tokens = 0;
  uint64_t latin_tokens = 0;
  uint64_t other_tokens = 0;

  uint64_t nsp_positive = 0;
  double nsp_positive_rate = 0.0;

  bool vocab_fingerprint_matches = true;
};

// Serialization of one audit entry as a sidecar JSONL line (without the
// trailing newline).
std::string sidecar_line(uint64_t index, const build::InstanceAudit& audit);

// Parses a sidecar line; throws kData when malformed or when the stored
// index differs from expect_index (record/sidecar streams must align).
build::InstanceAudit parse_sidecar_line(std::string_view line,
                                        uint64_t expect_index);

// Analyzes a record file (either format). sidecar_path may be empty.
// threads >= 1 partitions batches; results are identical for any value.
StatsReport analyze(const std::string& records_path, const tok::Vocab& vocab,
                    const std::string& sidecar_path, uint32_t threads);

// Pretty JSON rendering of the report.
std::string to_json(const StatsReport& report);

}  // namespace wwm::stats
