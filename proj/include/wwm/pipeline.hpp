// Copyright 2026 the wwm-pipeline authors.
// SPDX-License-Identifier: Apache-2.0
//
// End-to-end orchestration used by the CLI: canonical corpus in, record
// file (+ optional audit sidecar) and run manifest out.
//
// Parallelism never changes output bytes. Documents are tokenized
// independently; instance creation runs one task per (document, dupe) pair
// with rng streams derived from task indices; emission is serialized in
// lexicographic (doc_index, dupe_index, sequence_index) order.

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "wwm/builder.hpp"
#include "wwm/records.hpp"
#include "wwm/segmenter.hpp"
#include "wwm/tokenizer.hpp"

namespace wwm::pipeline {

struct BuildPaths {
  std::string corpus;
  std::string vocab;
  std::string lexicon;   // required for fmm mode, unused otherwise
  std::string records;   // output record file
  std::string sidecar;   // derived: records + ".units.jsonl" when emitting
  std::string manifest;  // derived: records + ".manifest.json"
};

struct BuildOptions {
  build::BuilderConfig config;
  seg::Mode mode = seg::Mode::kFmm;
  rec::Format format = rec::Format::kJsonl;
  bool lowercase = false;
  bool emit_units = false;
  uint32_t threads = 1;
};

struct BuildSummary {
  uint64_t documents = 0;
  uint64_t sentences = 0;
  uint64_t tokens = 0;
  uint64_t instances = 0;
  uint64_t align_mismatches = 0;
  uint64_t nsp_fallbacks = 0;
  uint64_t skipped_degenerate = 0;
};

// Tokenizes, segments, and aligns every document (parallel over documents).
// Sentences that tokenize to nothing are dropped, as are documents left
// empty. mismatches/tokens accumulate the respective counters.
std::vector<build::DocumentTokens> tokenize_corpus(
    const std::vector<std::vector<std::string>>& documents,
    const tok::Tokenizer& tokenizer, const seg::Lexicon* lexicon,
    seg::Mode mode, uint32_t threads, uint64_t& mismatches, uint64_t& tokens);

// Runs the whole build. Derives sidecar/manifest paths when empty. Returns
// the summary that also lands in the manifest.
BuildSummary run_build(const BuildPaths& paths, const BuildOptions& options);

// The manifest records the effective configuration and counters -- enough
// to reproduce the output byte-for-byte. It deliberately excludes
// execution details (threads, timings).
std::string manifest_json(const BuildPaths& paths, const BuildOptions& options,
                          const BuildSummary& summary,
                          uint64_t vocab_fingerprint);

// Parses a manifest back into (paths, options); throws kData on malformed
// input. threads is left untouched.
void parse_manifest(const std::string& json_text, BuildPaths& paths,
                    BuildOptions& options);

// Writes content to path via a temp file + rename (atomic on POSIX).
void write_file_atomic(const std::string& path, std::string_view content);

// Reads a whole file; throws kIo.
std::string read_file(const std::string& path);

}  // namespace wwm::pipeline
