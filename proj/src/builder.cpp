// Copyright 2026 the wwm-pipeline authors.
// SPDX-License-Identifier: Apache-2.0

#include "wwm/builder.hpp"

#include <algorithm>
#include <cmath>

#include "wwm/error.hpp"

namespace wwm::build {
namespace {

// Logical window [lo, hi) over a SegmentBuffer, so truncation does not
// repeatedly shift vectors.
struct Window {
  uint32_t lo = 0;
  uint32_t hi = 0;
};

// Materializes buf[w.lo, w.hi), re-basing units to the window and
// dissolving units that were cut by it.
SegmentBuffer materialize(const SegmentBuffer& buf, Window w) {
  SegmentBuffer out;
  out.ids.assign(buf.ids.begin() + w.lo, buf.ids.begin() + w.hi);
  for (const mask::WordUnit& u : buf.units) {
    uint32_t lo = std::max(u.begin, w.lo);
    uint32_t hi = std::min(u.end, w.hi);
    if (lo >= hi) continue;
    if (u.begin >= w.lo && u.end <= w.hi) {
      out.units.push_back({u.begin - w.lo, u.end - w.lo});
    } else {
      // Partially cut: survivors become single-token units.
      for (uint32_t p = lo; p < hi; ++p) {
        out.units.push_back({p - w.lo, p - w.lo + 1});
      }
    }
  }
  return out;
}

}  // namespace

uint32_t BuilderConfig::effective_max_predictions() const {
  if (max_predictions_per_seq != 0) return max_predictions_per_seq;
  return uint32_t(std::ceil(double(max_seq_len) * masked_lm_prob));
}

mask::MaskingConfig BuilderConfig::masking() const {
  mask::MaskingConfig m;
  m.masked_lm_prob = masked_lm_prob;
  m.max_predictions_per_seq = effective_max_predictions();
  m.mask_ratio = mask_ratio;
  m.random_ratio = random_ratio;
  m.keep_ratio = keep_ratio;
  return m;
}

void BuilderConfig::validate() const {
  if (max_seq_len < 5) {
    throw_data("build: max_seq_len must be at least 5 ([CLS] a [SEP] b [SEP])");
  }
  auto in_unit = [](double p) { return p >= 0.0 && p <= 1.0; };
  if (!in_unit(masked_lm_prob) || !in_unit(short_seq_prob) ||
      !in_unit(nsp_random_prob) || !in_unit(mask_ratio) ||
      !in_unit(random_ratio) || !in_unit(keep_ratio)) {
    throw_data("build: probabilities must lie in [0, 1]");
  }
  if (std::abs(mask_ratio + random_ratio + keep_ratio - 1.0) > 1e-9) {
    throw_data("build: mask/random/keep ratios must sum to 1");
  }
  if (dupe_factor < 1) throw_data("build: dupe_factor must be >= 1");
  if (effective_max_predictions() > max_seq_len) {
    throw_data("build: max_predictions_per_seq exceeds max_seq_len");
  }
}

void SegmentBuffer::append(const SentenceTokens& sentence) {
  uint32_t offset = uint32_t(ids.size());
  ids.insert(ids.end(), sentence.ids.begin(), sentence.ids.end());
  for (const mask::WordUnit& u : sentence.units) {
    units.push_back({u.begin + offset, u.end + offset});
  }
}

void truncate_pair(SegmentBuffer& a, SegmentBuffer& b, uint32_t target_len,
                   rng::Rng& rng) {
  Window wa{0, uint32_t(a.size())};
  Window wb{0, uint32_t(b.size())};
  uint32_t total = (wa.hi - wa.lo) + (wb.hi - wb.lo);
  bool trimmed = false;
  while (total > target_len) {
    Window& w = (wa.hi - wa.lo) > (wb.hi - wb.lo) ? wa : wb;
    // Trim front or back with equal probability so truncation does not
    // systematically bias against sequence heads or tails.
    if (rng.next_double() < 0.5) {
      ++w.lo;
    } else {
      --w.hi;
    }
    --total;
    trimmed = true;
  }
  if (trimmed) {
    a = materialize(a, wa);
    b = materialize(b, wb);
  }
}

TrainingInstance finalize_instance(const SegmentBuffer& a,
                                   const SegmentBuffer& b, bool is_random_next,
                                   const BuilderConfig& cfg,
                                   const tok::Vocab& vocab,
                                   rng::Rng& instance_rng,
                                   InstanceAudit* audit) {
  const tok::SpecialIds& sp = vocab.specials();
  const uint32_t a_len = uint32_t(a.size());
  const uint32_t b_len = uint32_t(b.size());
  const uint32_t full_len = a_len + b_len + 3;

  std::vector<int32_t> ids;
  ids.reserve(cfg.max_seq_len);
  ids.push_back(sp.cls);
  ids.insert(ids.end(), a.ids.begin(), a.ids.end());
  ids.push_back(sp.sep);
  ids.insert(ids.end(), b.ids.begin(), b.ids.end());
  ids.push_back(sp.sep);

  // Word units in packed coordinates; [CLS]/[SEP] belong to none.
  std::vector<mask::WordUnit> units;
  units.reserve(a.units.size() + b.units.size());
  for (const mask::WordUnit& u : a.units) {
    units.push_back({u.begin + 1, u.end + 1});
  }
  for (const mask::WordUnit& u : b.units) {
    units.push_back({u.begin + a_len + 2, u.end + a_len + 2});
  }

  const mask::MaskingConfig mcfg = cfg.masking();
  std::vector<mask::WordUnit> chosen =
      mask::select_units(units, full_len, mcfg, instance_rng);
  std::vector<mask::MaskedPosition> masked =
      mask::apply_mask(ids, chosen, mcfg, vocab, instance_rng);

  TrainingInstance inst;
  inst.input_ids = std::move(ids);
  inst.input_ids.resize(cfg.max_seq_len, sp.pad);
  inst.input_mask.assign(full_len, 1);
  inst.input_mask.resize(cfg.max_seq_len, 0);
  inst.segment_ids.assign(a_len + 2, 0);
  inst.segment_ids.resize(full_len, 1);
  inst.segment_ids.resize(cfg.max_seq_len, 0);
  inst.next_sentence_label = is_random_next ? 1 : 0;

  const uint32_t max_pred = mcfg.max_predictions_per_seq;
  inst.masked_lm_positions.assign(max_pred, 0);
  inst.masked_lm_ids.assign(max_pred, 0);
  inst.masked_lm_weights.assign(max_pred, 0.0f);
  for (size_t i = 0; i < masked.size(); ++i) {
    inst.masked_lm_positions[i] = int32_t(masked[i].index);
    inst.masked_lm_ids[i] = masked[i].original_id;
    inst.masked_lm_weights[i] = 1.0f;
  }

  if (audit != nullptr) {
    audit->units = std::move(units);
    audit->positions.clear();
    audit->actions.clear();
    for (const mask::MaskedPosition& mp : masked) {
      audit->positions.push_back(mp.index);
      audit->actions.push_back(mp.action);
    }
  }
  return inst;
}

std::vector<TrainingInstance> create_instances_for_document(
    const std::vector<DocumentTokens>& all_docs, size_t doc_index,
    uint32_t dupe_index, const BuilderConfig& cfg, const tok::Vocab& vocab,
    BuildCounters& counters, std::vector<InstanceAudit>* audits) {
  std::vector<TrainingInstance> instances;
  const DocumentTokens& doc = all_docs[doc_index];
  if (doc.sentences.empty()) return instances;

  rng::Rng doc_rng(
      rng::derive_stream(cfg.seed, {uint64_t(doc_index), dupe_index}));

  const uint32_t max_num_tokens = cfg.max_seq_len - 3;
  uint32_t target_len = max_num_tokens;
  if (doc_rng.next_double() < cfg.short_seq_prob) {
    target_len = 2 + doc_rng.next_below(max_num_tokens - 1);  // 2..max
  }

  std::vector<size_t> chunk;
  size_t chunk_tokens = 0;
  size_t i = 0;
  while (i < doc.sentences.size()) {
    chunk.push_back(i);
    chunk_tokens += doc.sentences[i].ids.size();

    if (i == doc.sentences.size() - 1 || chunk_tokens >= target_len) {
      // Segment A ends at a random sentence boundary within the chunk.
      size_t a_end = 1;
      if (chunk.size() >= 2) {
        a_end = 1 + doc_rng.next_below(uint32_t(chunk.size() - 1));
      }
      SegmentBuffer a;
      for (size_t k = 0; k < a_end; ++k) {
        a.append(doc.sentences[chunk[k]]);
      }

      SegmentBuffer b;
      bool is_random_next = false;
      bool want_random = chunk.size() == 1;
      if (!want_random) {
        want_random = doc_rng.next_double() < cfg.nsp_random_prob;
      }

      if (want_random && all_docs.size() > 1) {
        is_random_next = true;
        int64_t target_b = int64_t(target_len) - int64_t(a.size());
        uint32_t pick = doc_rng.next_below(uint32_t(all_docs.size() - 1));
        size_t random_index = pick >= doc_index ? pick + 1 : pick;
        const DocumentTokens& random_doc = all_docs[random_index];
        size_t start =
            doc_rng.next_below(uint32_t(random_doc.sentences.size()));
        for (size_t j = start; j < random_doc.sentences.size(); ++j) {
          b.append(random_doc.sentences[j]);
          if (int64_t(b.size()) >= target_b) break;
        }
        // The unconsumed tail of the chunk goes back to the stream.
        i -= chunk.size() - a_end;
      } else {
        if (want_random) {
          // A random-document B is impossible with a single document;
          // fall back to an actual-next pair.
          ++counters.nsp_fallbacks;
        }
        for (size_t k = a_end; k < chunk.size(); ++k) {
          b.append(doc.sentences[chunk[k]]);
        }
        if (b.size() == 0) {
          // Single-sentence chunk in a single-document corpus: split A
          // itself so the pair invariant (two non-empty segments) holds.
          if (a.size() >= 2) {
            uint32_t cut = uint32_t(a.size() + 1) / 2;
            SegmentBuffer whole = std::move(a);
            a = materialize(whole, {0, cut});
            b = materialize(whole, {cut, uint32_t(whole.size())});
          } else {
            ++counters.skipped_degenerate;
            chunk.clear();
            chunk_tokens = 0;
            ++i;
            continue;
          }
        }
      }

      truncate_pair(a, b, target_len, doc_rng);
      if (a.size() == 0 || b.size() == 0) {
        ++counters.skipped_degenerate;
      } else {
        rng::Rng instance_rng(rng::derive_stream(
            cfg.seed,
            {uint64_t(doc_index), dupe_index, instances.size()}));
        InstanceAudit audit;
        instances.push_back(finalize_instance(
            a, b, is_random_next, cfg, vocab, instance_rng,
            audits != nullptr ? &audit : nullptr));
        if (audits != nullptr) audits->push_back(std::move(audit));
        ++counters.instances;
      }
      chunk.clear();
      chunk_tokens = 0;
    }
    ++i;
  }
  return instances;
}

}  // namespace wwm::build
