// Copyright 2026 the wwm-pipeline authors.
// SPDX-License-Identifier: Apache-2.0
//
// Pre-training example builder: packs tokenized sentences into
// [CLS] A [SEP] B [SEP] pairs with a next-sentence-prediction label,
// truncates oversize pairs, and applies whole-word masking to the packed
// sequence. The packing walk mirrors the original BERT data pipeline:
// sentences accumulate greedily to a per-document target length (shortened
// with probability short_seq_prob), segment A ends at a random sentence
// boundary, and segment B is the remainder (label 0) or sentences pulled
// from a random other document (label 1).
//
// Determinism: every (document, dupe) pass uses an rng stream derived from
// (seed, doc_index, dupe_index) for packing decisions, and every produced
// sequence uses a stream derived from (seed, doc_index, dupe_index,
// sequence_index) for masking, so results never depend on thread schedule.

#pragma once

#include <cstdint>
#include <vector>

#include "wwm/masking.hpp"
#include "wwm/rng.hpp"
#include "wwm/vocab.hpp"

namespace wwm::build {

struct BuilderConfig {
  uint32_t max_seq_len = 128;
  // 0 means "derive": ceil(max_seq_len * masked_lm_prob), i.e. 20 at 128
  // and 77 at 512.
  uint32_t max_predictions_per_seq = 0;
  double masked_lm_prob = 0.15;
  double mask_ratio = 0.8;
  double random_ratio = 0.1;
  double keep_ratio = 0.1;
  double short_seq_prob = 0.1;
  double nsp_random_prob = 0.5;
  uint32_t dupe_factor = 2;
  uint64_t seed = 12345;

  uint32_t effective_max_predictions() const;
  mask::MaskingConfig masking() const;
  // Throws kData on out-of-range values (ratios must sum to 1, etc.).
  void validate() const;
};

// One tokenized sentence: WordPiece ids plus its word units.
struct SentenceTokens {
  std::vector<int32_t> ids;
  std::vector<mask::WordUnit> units;
};

struct DocumentTokens {
  std::vector<SentenceTokens> sentences;
};

// A fully packed, masked, padded training example.
struct TrainingInstance {
  std::vector<int32_t> input_ids;            // len == max_seq_len
  std::vector<int32_t> input_mask;           // 1 for real tokens, 0 for pad
  std::vector<int32_t> segment_ids;          // 0 through first [SEP], then 1
  std::vector<int32_t> masked_lm_positions;  // len == max_predictions_per_seq
  std::vector<int32_t> masked_lm_ids;        // original ids at those positions
  std::vector<float> masked_lm_weights;      // 1.0 for real entries, 0.0 pad
  int32_t next_sentence_label = 0;
};

// Sidecar information for auditing: the instance's word units in packed
// token coordinates, plus what happened at each masked position.
struct InstanceAudit {
  std::vector<mask::WordUnit> units;
  std::vector<uint32_t> positions;
  std::vector<mask::Action> actions;
};

struct BuildCounters {
  uint64_t instances = 0;
  uint64_t nsp_fallbacks = 0;       // wanted a random B but corpus has 1 doc
  uint64_t skipped_degenerate = 0;  // chunk too small to form a pair
};

// A growing segment: token ids plus word units in segment coordinates.
struct SegmentBuffer {
  std::vector<int32_t> ids;
  std::vector<mask::WordUnit> units;

  void append(const SentenceTokens& sentence);
  size_t size() const { return ids.size(); }
};

// Trims the pair to at most target_len total tokens, one token per step,
// always from the longer segment (ties trim b), front or back on a coin
// flip. Word units overlapping removed tokens dissolve into per-token
// units over the surviving remainder.
void truncate_pair(SegmentBuffer& a, SegmentBuffer& b, uint32_t target_len,
                   rng::Rng& rng);

// Packs and masks one instance. instance_rng must be the per-sequence
// stream; audit may be null.
TrainingInstance finalize_instance(const SegmentBuffer& a,
                                   const SegmentBuffer& b, bool is_random_next,
                                   const BuilderConfig& cfg,
                                   const tok::Vocab& vocab,
                                   rng::Rng& instance_rng,
                                   InstanceAudit* audit);

// Produces all instances for one (document, dupe) pass. all_docs must not
// contain empty documents. Appends audits (one per instance) when audits
// is non-null.
std::vector<TrainingInstance> create_instances_for_document(
    const std::vector<DocumentTokens>& all_docs, size_t doc_index,
    uint32_t dupe_index, const BuilderConfig& cfg, const tok::Vocab& vocab,
    BuildCounters& counters, std::vector<InstanceAudit>* audits);

}  // namespace wwm::build
