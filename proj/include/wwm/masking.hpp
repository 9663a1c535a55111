// Copyright 2026 the wwm-pipeline authors.
// SPDX-License-Identifier: Apache-2.0
//
// Whole-word masking. Words (from segmentation) are aligned with WordPieces
// (from tokenization) into word units -- contiguous token index ranges that
// must be masked atomically: if any piece of a word is chosen, every piece
// of that word is chosen. Unit selection walks the units in shuffled order
// under a token budget, skipping any unit that would overflow it; the
// masked positions then independently draw replace-with-[MASK] / random-id /
// keep-original actions.

#pragma once

#include <cstdint>
#include <vector>

#include "wwm/rng.hpp"
#include "wwm/segmenter.hpp"
#include "wwm/tokenizer.hpp"
#include "wwm/vocab.hpp"

namespace wwm::mask {

// Half-open token index range [begin, end) forming one word unit.
struct WordUnit {
  uint32_t begin = 0;
  uint32_t end = 0;

  uint32_t size() const { return end - begin; }
  friend bool operator==(const WordUnit&, const WordUnit&) = default;
};

struct AlignResult {
  std::vector<WordUnit> units;  // ascending, non-overlapping, covers all tokens
  uint32_t mismatches = 0;      // straddles resolved by per-token fallback
};

// Aligns word spans with token spans (both codepoint offsets into the same
// sentence). A token straddling a word boundary dissolves the affected
// region into single-token units and bumps the mismatch counter; every
// token index ends up in exactly one unit either way.
AlignResult align(const std::vector<seg::Word>& words,
                  const tok::TokenSeq& tokens);

struct MaskingConfig {
  double masked_lm_prob = 0.15;
  uint32_t max_predictions_per_seq = 20;
  double mask_ratio = 0.8;    // replace with [MASK]
  double random_ratio = 0.1;  // replace with a random non-special id
  double keep_ratio = 0.1;    // keep the original id
};

// Rounds half away from zero (0.5 -> 1), the rounding the budget formula
// is pinned to.
uint32_t round_half_away(double x);

// min(max_predictions_per_seq, max(1, round(token_count * masked_lm_prob)))
uint32_t num_to_predict(size_t token_count, const MaskingConfig& cfg);

// Selects whole units under the budget: visits units in rng-shuffled order
// and accepts a unit iff accepted_tokens + unit.size() <= budget (oversized
// units are skipped whole, preserving atomicity). Returned in acceptance
// order -- the order apply_mask draws actions in.
std::vector<WordUnit> select_units(const std::vector<WordUnit>& units,
                                   size_t token_count,
                                   const MaskingConfig& cfg, rng::Rng& rng);

enum class Action : uint8_t { kMask = 0, kRandom = 1, kKeep = 2 };

struct MaskedPosition {
  uint32_t index = 0;       // token position
  int32_t original_id = 0;  // label: the id before masking
  Action action = Action::kMask;
};

// Applies masking in place. For every position of every chosen unit (units
// in the given order, positions ascending within a unit) one action is
// drawn: mask_ratio -> [MASK], random_ratio -> uniform random vocab id
// excluding the five specials, keep_ratio -> unchanged. Labels always
// record the original id. The result is sorted by position.
std::vector<MaskedPosition> apply_mask(std::vector<int32_t>& ids,
                                       const std::vector<WordUnit>& chosen,
                                       const MaskingConfig& cfg,
                                       const tok::Vocab& vocab, rng::Rng& rng);

}  // namespace wwm::mask
