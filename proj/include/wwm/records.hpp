// Copyright 2026 the wwm-pipeline authors.
// SPDX-License-Identifier: Apache-2.0
//
// Training-record serialization in two interchangeable formats:
//
//   jsonl  -- first line is a {"__header__": ...} object, then one object
//             per instance with keys, in order: input_ids, input_mask,
//             segment_ids, masked_lm_positions, masked_lm_ids,
//             masked_lm_weights, next_sentence_label.
//   binary -- "WWMR" magic + header, then per record a u32 payload length
//             followed by the same fields as fixed-width little-endian
//             i32 arrays (f32 for weights, u8 for the label).
//
// Writers are byte-deterministic: the same instances always serialize to
// the same bytes. The header carries an FNV-1a fingerprint of the vocab
// file so consumers can detect vocab drift.

#pragma once

#include <cstdint>
#include <fstream>
#include <string>

#include "wwm/builder.hpp"

namespace wwm::rec {

enum class Format { kJsonl, kBinary };

bool parse_format(std::string_view name, Format& format);
const char* format_name(Format format);

struct RecordHeader {
  uint32_t format_version = 1;
  uint32_t max_seq_len = 0;
  uint32_t max_predictions_per_seq = 0;
  uint64_t vocab_fingerprint = 0;
};

class RecordWriter {
 public:
  // Opens path and writes the header. Throws kIo on failure.
  RecordWriter(const std::string& path, Format format,
               const RecordHeader& header);

  // Throws kData if the instance does not match the header dimensions.
  void write(const build::TrainingInstance& instance);

  // Flushes and closes; throws kIo on write failure. Also called by the
  // destructor (which swallows errors).
  void finish();

  ~RecordWriter();

  uint64_t records_written() const { return count_; }

 private:
  std::ofstream out_;
  std::string path_;
  Format format_;
  RecordHeader header_;
  uint64_t count_ = 0;
  bool finished_ = false;
};

class RecordReader {
 public:
  // Opens path, sniffs the format (binary magic vs JSON), and reads the
  // header. Throws kIo / kData.
  explicit RecordReader(const std::string& path);

  const RecordHeader& header() const { return header_; }
  Format format() const { return format_; }

  // Reads the next record. Returns false at clean end-of-file; throws
  // kData (naming the record index) on truncation or corruption.
  bool next(build::TrainingInstance& out);

 private:
  std::ifstream in_;
  std::string path_;
  Format format_ = Format::kJsonl;
  RecordHeader header_;
  uint64_t index_ = 0;
};

// Hex form used for fingerprints in JSON ("%016x").
std::string fingerprint_hex(uint64_t fp);
bool parse_fingerprint(const std::string& hex, uint64_t& fp);

}  // namespace wwm::rec
