// Copyright 2026 the wwm-pipeline authors.
// SPDX-License-Identifier: Apache-2.0

#include "wwm/masking.hpp"

#include <algorithm>
#include <cmath>

namespace wwm::mask {

AlignResult align(const std::vector<seg::Word>& words,
                  const tok::TokenSeq& tokens) {
  AlignResult result;
  const size_t nt = tokens.size();
  size_t t = 0;

  for (const seg::Word& w : words) {
    // Tokens lying fully inside this word.
    size_t inside_start = t;
    while (t < nt && tokens[t].begin >= w.begin && tokens[t].end <= w.end) {
      ++t;
    }
    bool straddler = t < nt && tokens[t].begin >= w.begin &&
                     tokens[t].begin < w.end && tokens[t].end > w.end;
    if (straddler) {
      // Tokenizer and segmenter disagree on this boundary: dissolve the
      // region into per-token units so masking stays well-defined.
      ++result.mismatches;
      for (size_t k = inside_start; k < t; ++k) {
        result.units.push_back({uint32_t(k), uint32_t(k + 1)});
      }
      result.units.push_back({uint32_t(t), uint32_t(t + 1)});
      ++t;
    } else if (t > inside_start) {
      result.units.push_back({uint32_t(inside_start), uint32_t(t)});
    }
    // A word with no tokens of its own (fully consumed by an earlier
    // straddler, or containing only separator characters) yields no unit.
  }

  // Defensive: any tokens past the last word become single-token units so
  // the cover-all-tokens invariant holds even for inconsistent inputs.
  if (t < nt) {
    ++result.mismatches;
    for (; t < nt; ++t) {
      result.units.push_back({uint32_t(t), uint32_t(t + 1)});
    }
  }
  return result;
}

uint32_t round_half_away(double x) {
  return uint32_t(std::floor(x + 0.5));
}

uint32_t num_to_predict(size_t token_count, const MaskingConfig& cfg) {
  uint32_t by_prob =
      round_half_away(double(token_count) * cfg.masked_lm_prob);
  return std::min(cfg.max_predictions_per_seq, std::max(1u, by_prob));
}

std::vector<WordUnit> select_units(const std::vector<WordUnit>& units,
                                   size_t token_count,
                                   const MaskingConfig& cfg, rng::Rng& rng) {
  const uint32_t budget = num_to_predict(token_count, cfg);

  std::vector<uint32_t> order(units.size());
  for (uint32_t i = 0; i < order.size(); ++i) order[i] = i;
  rng.shuffle(order);

  std::vector<WordUnit> accepted;
  uint32_t accepted_tokens = 0;
  for (uint32_t idx : order) {
    const WordUnit& u = units[idx];
    if (accepted_tokens + u.size() > budget) continue;  // skip whole unit
    accepted.push_back(u);
    accepted_tokens += u.size();
  }
  return accepted;
}

std::vector<MaskedPosition> apply_mask(std::vector<int32_t>& ids,
                                       const std::vector<WordUnit>& chosen,
                                       const MaskingConfig& cfg,
                                       const tok::Vocab& vocab,
                                       rng::Rng& rng) {
  std::vector<MaskedPosition> positions;
  const double mask_cut = cfg.mask_ratio;
  const double random_cut = cfg.mask_ratio + cfg.random_ratio;

  for (const WordUnit& unit : chosen) {
    for (uint32_t pos = unit.begin; pos < unit.end; ++pos) {
      MaskedPosition mp;
      mp.index = pos;
      mp.original_id = ids[pos];

      double u = rng.next_double();
      if (u < mask_cut) {
        mp.action = Action::kMask;
        ids[pos] = vocab.specials().mask;
      } else if (u < random_cut) {
        mp.action = Action::kRandom;
        // Uniform over non-special ids via rejection (at most 5 of the
        // draws are specials, so this terminates fast).
        int32_t pick;
        do {
          pick = int32_t(rng.next_below(uint32_t(vocab.size())));
        } while (vocab.is_special(pick));
        ids[pos] = pick;
      } else {
        mp.action = Action::kKeep;
      }
      positions.push_back(mp);
    }
  }
  std::sort(positions.begin(), positions.end(),
            [](const MaskedPosition& a, const MaskedPosition& b) {
              return a.index < b.index;
            });
  return positions;
}

}  // namespace wwm::mask
