// Copyright 2026 the wwm-pipeline authors.
// SPDX-License-Identifier: Apache-2.0
//
// wwm -- whole-word-masking pre-training data pipeline.
//
//   wwm ingest    raw text -> canonical corpus (clean + sentence split)
//   wwm tokenize  inspect segmentation / wordpieces / word units
//   wwm build     corpus -> masked LM training records (+ manifest)
//   wwm stats     integrity report over a record file
//
// Exit codes: 0 success, 1 usage, 2 data error, 3 I/O error.
// Set WWM_LOG=error|warn|info|debug for stderr diagnostics.

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "wwm/error.hpp"
#include "wwm/kernels.hpp"
#include "wwm/log.hpp"
#include "wwm/pipeline.hpp"
#include "wwm/stats.hpp"
#include "wwm/text_clean.hpp"
#include "wwm/version.hpp"

namespace {

namespace fs = std::filesystem;
using namespace wwm;

struct IngestArgs {
  std::vector<std::string> inputs;
  std::string out;
};

int run_ingest(const IngestArgs& args) {
  // Deterministic file order regardless of directory iteration order.
  std::vector<fs::path> files;
  for (const std::string& input : args.inputs) {
    fs::path p(input);
    std::error_code ec;
    if (fs::is_directory(p, ec)) {
      for (const auto& entry : fs::recursive_directory_iterator(p)) {
        if (entry.is_regular_file()) files.push_back(entry.path());
      }
    } else if (fs::is_regular_file(p, ec)) {
      files.push_back(p);
    } else {
      throw_io("ingest: no such file or directory: '" + input + "'");
    }
  }
  std::sort(files.begin(), files.end());
  if (files.empty()) throw_data("ingest: no input files");

  std::vector<std::vector<std::string>> documents;
  text::CleanCounters counters;
  uint64_t raw_docs = 0;
  for (const fs::path& file : files) {
    std::string content = pipeline::read_file(file.string());
    for (const text::RawDocument& raw :
         text::extract_documents(content, file.filename().string())) {
      ++raw_docs;
      std::string cleaned = text::clean_text(raw.body, &counters);
      std::vector<std::string> sentences = text::split_sentences(cleaned);
      if (!sentences.empty()) documents.push_back(std::move(sentences));
    }
  }

  uint64_t sentence_count = 0;
  for (const auto& d : documents) sentence_count += d.size();
  pipeline::write_file_atomic(args.out, text::to_corpus(documents));

  std::printf("ingest: %zu documents (%llu raw), %llu sentences -> %s\n",
              documents.size(), (unsigned long long)raw_docs,
              (unsigned long long)sentence_count, args.out.c_str());
  log::debug("ingest: stripped %llu tags, removed %llu control chars",
             (unsigned long long)counters.tags_stripped,
             (unsigned long long)counters.control_removed);
  return 0;
}

struct TokenizeArgs {
  std::string vocab;
  std::string lexicon;
  std::string mode = "fmm";
  std::string text;
  std::string input;
  bool lowercase = false;
};

int run_tokenize(const TokenizeArgs& args) {
  seg::Mode mode;
  if (!seg::parse_mode(args.mode, mode)) {
    throw_usage("tokenize: unknown --mode '" + args.mode + "'");
  }
  tok::Vocab vocab = tok::Vocab::load(args.vocab);
  tok::TokenizerOptions topt;
  topt.lowercase = args.lowercase;
  tok::Tokenizer tokenizer(vocab, topt);

  std::optional<seg::Lexicon> lexicon;
  if (mode == seg::Mode::kFmm) {
    if (args.lexicon.empty()) throw_usage("tokenize: fmm mode requires --lexicon");
    lexicon = seg::Lexicon::load(args.lexicon);
  }

  std::vector<std::string> sentences;
  if (!args.text.empty()) {
    sentences.push_back(args.text);
  } else if (!args.input.empty()) {
    for (auto& doc : text::parse_corpus(pipeline::read_file(args.input))) {
      for (auto& s : doc) sentences.push_back(std::move(s));
    }
  } else {
    throw_usage("tokenize: need --text or --input");
  }

  for (const std::string& sentence : sentences) {
    std::vector<seg::Word> words;
    tok::TokenSeq pieces;
    std::string joined;
    switch (mode) {
      case seg::Mode::kFmm:
        words = seg::fmm_segment(sentence, *lexicon);
        pieces = tokenizer.tokenize(sentence);
        break;
      case seg::Mode::kChars:
        words = seg::char_segment(sentence);
        pieces = tokenizer.tokenize(sentence);
        break;
      case seg::Mode::kPresegmented:
        words = seg::parse_presegmented(sentence, joined);
        pieces = tokenizer.tokenize(joined);
        break;
    }
    mask::AlignResult aligned = mask::align(words, pieces);

    std::string words_row, pieces_row, units_row;
    for (const seg::Word& w : words) {
      if (!words_row.empty()) words_row += ' ';
      words_row += w.text;
    }
    for (const tok::Piece& p : pieces) {
      if (!pieces_row.empty()) pieces_row += ' ';
      pieces_row += p.text;
    }
    for (const mask::WordUnit& u : aligned.units) {
      std::string unit_text;
      for (uint32_t t = u.begin; t < u.end; ++t) {
        std::string_view s = pieces[t].text;
        if (s.rfind("##", 0) == 0) s.remove_prefix(2);
        unit_text.append(s);
      }
      if (!units_row.empty()) units_row += ' ';
      units_row += unit_text + "(" + std::to_string(u.size()) + ")";
    }

    std::printf("sentence: %s\n", sentence.c_str());
    std::printf("words:    %s\n", words_row.c_str());
    std::printf("pieces:   %s\n", pieces_row.c_str());
    std::printf("units:    %s\n", units_row.c_str());
    if (aligned.mismatches > 0) {
      std::printf("mismatches: %u\n", aligned.mismatches);
    }
    std::printf("\n");
  }
  return 0;
}

struct BuildArgs {
  pipeline::BuildPaths paths;
  pipeline::BuildOptions options;
  std::string mode = "fmm";
  std::string format = "jsonl";
  std::string from_manifest;
};

int run_build(BuildArgs& args, const CLI::App* cmd) {
  if (!args.from_manifest.empty()) {
    // The manifest supplies every path and config value; flags passed
    // explicitly alongside --from-manifest win over the manifest.
    BuildArgs given = args;
    pipeline::parse_manifest(pipeline::read_file(args.from_manifest),
                             args.paths, args.options);
    if (cmd->count("--corpus")) args.paths.corpus = given.paths.corpus;
    if (cmd->count("--vocab")) args.paths.vocab = given.paths.vocab;
    if (cmd->count("--lexicon")) args.paths.lexicon = given.paths.lexicon;
    if (cmd->count("--out")) args.paths.records = given.paths.records;
    if (cmd->count("--threads")) args.options.threads = given.options.threads;
    if (cmd->count("--random-seed")) {
      args.options.config.seed = given.options.config.seed;
    }
    if (cmd->count("--emit-units")) {
      args.options.emit_units = given.options.emit_units;
    }
  } else {
    if (!seg::parse_mode(args.mode, args.options.mode)) {
      throw_usage("build: unknown --mode '" + args.mode + "'");
    }
    if (!rec::parse_format(args.format, args.options.format)) {
      throw_usage("build: unknown --format '" + args.format + "'");
    }
  }
  if (args.paths.corpus.empty() || args.paths.vocab.empty() ||
      args.paths.records.empty()) {
    throw_usage("build: --corpus, --vocab and --out are required");
  }

  log::debug("build: using %s byte-scan kernels", simd::active_kernel());
  pipeline::BuildSummary s = pipeline::run_build(args.paths, args.options);
  std::printf(
      "build: %llu instances (%llu docs, %llu sentences, %llu tokens) -> %s\n",
      (unsigned long long)s.instances, (unsigned long long)s.documents,
      (unsigned long long)s.sentences, (unsigned long long)s.tokens,
      args.paths.records.c_str());
  if (s.align_mismatches > 0) {
    log::warn("build: %llu word/token alignment mismatches (fell back to "
              "per-token units)",
              (unsigned long long)s.align_mismatches);
  }
  if (s.nsp_fallbacks > 0) {
    log::warn("build: %llu next-sentence pairs fell back to label 0 "
              "(single-document corpus)",
              (unsigned long long)s.nsp_fallbacks);
  }
  return 0;
}

struct StatsArgs {
  std::string records;
  std::string vocab;
  std::string sidecar;
  std::string out;
  uint32_t threads = 1;
};

int run_stats(const StatsArgs& args) {
  tok::Vocab vocab = tok::Vocab::load(args.vocab);
  stats::StatsReport report =
      stats::analyze(args.records, vocab, args.sidecar, args.threads);
  std::string json = stats::to_json(report);
  if (args.out.empty()) {
    std::printf("%s\n", json.c_str());
  } else {
    pipeline::write_file_atomic(args.out, json + "\n");
    std::printf("stats: report -> %s\n", args.out.c_str());
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"whole-word-masking pre-training data pipeline"};
  app.set_version_flag("--version", wwm::kVersion);
  app.require_subcommand(1);

  IngestArgs ingest;
  CLI::App* cmd_ingest =
      app.add_subcommand("ingest", "Clean raw text into the canonical corpus");
  cmd_ingest->add_option("--input", ingest.inputs, "Input files or directories")
      ->required();
  cmd_ingest->add_option("--out", ingest.out, "Output corpus file")->required();

  TokenizeArgs tokenize;
  CLI::App* cmd_tokenize = app.add_subcommand(
      "tokenize", "Show words, wordpieces and word units for sentences");
  cmd_tokenize->add_option("--vocab", tokenize.vocab, "WordPiece vocab file")
      ->required();
  cmd_tokenize->add_option("--lexicon", tokenize.lexicon, "Word lexicon (fmm)");
  cmd_tokenize->add_option("--mode", tokenize.mode,
                           "Segmentation: fmm|presegmented|char");
  cmd_tokenize->add_option("--text", tokenize.text, "One sentence to tokenize");
  cmd_tokenize->add_option("--input", tokenize.input, "Corpus file to tokenize");
  cmd_tokenize->add_flag("--lowercase", tokenize.lowercase,
                         "Lowercase + strip accents");

  BuildArgs build;
  CLI::App* cmd_build = app.add_subcommand(
      "build", "Build masked LM pre-training records from a corpus");
  cmd_build->add_option("--corpus", build.paths.corpus, "Canonical corpus file");
  cmd_build->add_option("--vocab", build.paths.vocab, "WordPiece vocab file");
  cmd_build->add_option("--lexicon", build.paths.lexicon, "Word lexicon (fmm)");
  cmd_build->add_option("--out", build.paths.records, "Output record file");
  cmd_build->add_option("--mode", build.mode, "Segmentation: fmm|presegmented|char");
  cmd_build->add_option("--format", build.format, "Output format: jsonl|binary");
  cmd_build->add_option("--max-seq-len", build.options.config.max_seq_len,
                        "Maximum sequence length");
  cmd_build->add_option("--max-predictions-per-seq",
                        build.options.config.max_predictions_per_seq,
                        "Masked position cap (0 = derive from length)");
  cmd_build->add_option("--masked-lm-prob", build.options.config.masked_lm_prob,
                        "Fraction of tokens to mask");
  cmd_build->add_option("--mask-ratio", build.options.config.mask_ratio,
                        "P(replace with [MASK]) at a masked position");
  cmd_build->add_option("--random-ratio", build.options.config.random_ratio,
                        "P(replace with random id) at a masked position");
  cmd_build->add_option("--keep-ratio", build.options.config.keep_ratio,
                        "P(keep original id) at a masked position");
  cmd_build->add_option("--short-seq-prob", build.options.config.short_seq_prob,
                        "P(shorter target length) per document");
  cmd_build->add_option("--nsp-random-prob",
                        build.options.config.nsp_random_prob,
                        "P(segment B from a random document)");
  cmd_build->add_option("--dupe-factor", build.options.config.dupe_factor,
                        "Passes over the corpus with different masks");
  cmd_build->add_option("--random-seed", build.options.config.seed,
                        "Master random seed");
  cmd_build->add_option("--threads", build.options.threads, "Worker threads");
  cmd_build->add_flag("--lowercase", build.options.lowercase,
                      "Lowercase + strip accents");
  cmd_build->add_flag("--emit-units", build.options.emit_units,
                      "Write the word-unit audit sidecar");
  cmd_build->add_option("--from-manifest", build.from_manifest,
                        "Re-run the build described by a manifest file");

  StatsArgs stats;
  CLI::App* cmd_stats =
      app.add_subcommand("stats", "Integrity report over a record file");
  cmd_stats->add_option("--records", stats.records, "Record file")->required();
  cmd_stats->add_option("--vocab", stats.vocab, "WordPiece vocab file")
      ->required();
  cmd_stats->add_option("--sidecar", stats.sidecar, "Word-unit audit sidecar");
  cmd_stats->add_option("--out", stats.out, "Write the JSON report here");
  cmd_stats->add_option("--threads", stats.threads, "Worker threads");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    // CLI11 returns 0 for --help/--version; anything else is a usage error.
    return code == 0 ? 0 : 1;
  }

  try {
    if (cmd_ingest->parsed()) return run_ingest(ingest);
    if (cmd_tokenize->parsed()) return run_tokenize(tokenize);
    if (cmd_build->parsed()) return run_build(build, cmd_build);
    if (cmd_stats->parsed()) return run_stats(stats);
    return 1;
  } catch (const wwm::Error& e) {
    log::error("%s", e.what());
    return e.exit_code();
  } catch (const std::exception& e) {
    log::error("unexpected: %s", e.what());
    return 3;
  }
}
