// Copyright 2026 the wwm-pipeline authors.
// SPDX-License-Identifier: Apache-2.0

#include "wwm/pipeline.hpp"

#include <atomic>
#include <condition_variable>
#include <cstdio>
#include <fstream>
#include <functional>
#include <mutex>
#include <optional>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "wwm/error.hpp"
#include "wwm/log.hpp"
#include "wwm/masking.hpp"
#include "wwm/stats.hpp"
#include "wwm/text_clean.hpp"
#include "wwm/version.hpp"

namespace wwm::pipeline {
namespace {

using ordered_json = nlohmann::ordered_json;

// Tokenizes + segments + aligns one sentence. Returns false when the
// sentence produces no tokens.
bool process_sentence(const std::string& sentence,
                      const tok::Tokenizer& tokenizer,
                      const seg::Lexicon* lexicon, seg::Mode mode,
                      build::SentenceTokens& out, uint64_t& mismatches) {
  std::vector<seg::Word> words;
  tok::TokenSeq pieces;
  switch (mode) {
    case seg::Mode::kFmm:
      words = seg::fmm_segment(sentence, *lexicon);
      pieces = tokenizer.tokenize(sentence);
      break;
    case seg::Mode::kChars:
      words = seg::char_segment(sentence);
      pieces = tokenizer.tokenize(sentence);
      break;
    case seg::Mode::kPresegmented: {
      // Tokenize the space-free join so word and token spans agree.
      std::string joined;
      words = seg::parse_presegmented(sentence, joined);
      pieces = tokenizer.tokenize(joined);
      break;
    }
  }
  if (pieces.empty()) return false;

  mask::AlignResult aligned = mask::align(words, pieces);
  mismatches += aligned.mismatches;

  out.ids.clear();
  out.ids.reserve(pieces.size());
  for (const tok::Piece& p : pieces) out.ids.push_back(p.id);
  out.units = std::move(aligned.units);
  return true;
}

void run_workers(uint32_t threads, size_t task_count,
                 const std::function<void(size_t)>& task) {
  if (threads <= 1 || task_count <= 1) {
    for (size_t i = 0; i < task_count; ++i) task(i);
    return;
  }
  std::atomic<size_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (uint32_t t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      while (true) {
        size_t i = next.fetch_add(1);
        if (i >= task_count) return;
        task(i);
      }
    });
  }
  for (std::thread& t : pool) t.join();
}

}  // namespace

std::vector<build::DocumentTokens> tokenize_corpus(
    const std::vector<std::vector<std::string>>& documents,
    const tok::Tokenizer& tokenizer, const seg::Lexicon* lexicon,
    seg::Mode mode, uint32_t threads, uint64_t& mismatches, uint64_t& tokens) {
  if (mode == seg::Mode::kFmm && lexicon == nullptr) {
    throw_usage("tokenize_corpus: fmm mode requires a lexicon");
  }

  std::vector<build::DocumentTokens> docs(documents.size());
  std::vector<uint64_t> doc_mismatches(documents.size(), 0);
  std::vector<uint64_t> doc_tokens(documents.size(), 0);
  std::vector<std::string> failure(documents.size());

  run_workers(threads, documents.size(), [&](size_t d) {
    try {
      for (const std::string& sentence : documents[d]) {
        build::SentenceTokens st;
        if (process_sentence(sentence, tokenizer, lexicon, mode, st,
                             doc_mismatches[d])) {
          doc_tokens[d] += st.ids.size();
          docs[d].sentences.push_back(std::move(st));
        }
      }
    } catch (const std::exception& e) {
      failure[d] = e.what();
    }
  });

  for (size_t d = 0; d < documents.size(); ++d) {
    if (!failure[d].empty()) {
      throw_data("document " + std::to_string(d) + ": " + failure[d]);
    }
    mismatches += doc_mismatches[d];
    tokens += doc_tokens[d];
  }

  // Drop documents that tokenized to nothing (the builder's document
  // indices are over surviving documents).
  std::vector<build::DocumentTokens> kept;
  kept.reserve(docs.size());
  for (auto& d : docs) {
    if (!d.sentences.empty()) kept.push_back(std::move(d));
  }
  return kept;
}

BuildSummary run_build(const BuildPaths& paths_in, const BuildOptions& options) {
  BuildPaths paths = paths_in;
  if (paths.manifest.empty()) paths.manifest = paths.records + ".manifest.json";
  if (options.emit_units && paths.sidecar.empty()) {
    paths.sidecar = paths.records + ".units.jsonl";
  }
  options.config.validate();

  const tok::Vocab vocab = tok::Vocab::load(paths.vocab);
  tok::TokenizerOptions topt;
  topt.lowercase = options.lowercase;
  const tok::Tokenizer tokenizer(vocab, topt);

  std::optional<seg::Lexicon> lexicon;
  if (options.mode == seg::Mode::kFmm) {
    if (paths.lexicon.empty()) {
      throw_usage("build: --mode fmm requires --lexicon");
    }
    lexicon = seg::Lexicon::load(paths.lexicon);
  }

  const std::string corpus_text = read_file(paths.corpus);
  const auto documents = text::parse_corpus(corpus_text);
  if (documents.empty()) throw_data("build: corpus contains no documents");

  BuildSummary summary;
  std::vector<build::DocumentTokens> docs = tokenize_corpus(
      documents, tokenizer, lexicon ? &*lexicon : nullptr, options.mode,
      options.threads, summary.align_mismatches, summary.tokens);
  if (docs.empty()) throw_data("build: corpus tokenized to nothing");
  summary.documents = docs.size();
  for (const auto& d : docs) summary.sentences += d.sentences.size();

  // One task per (document, dupe); emission strictly in task order, which
  // is lexicographic (doc_index, dupe_index, sequence_index).
  const uint32_t dupes = options.config.dupe_factor;
  const size_t task_count = docs.size() * dupes;

  struct TaskResult {
    std::vector<build::TrainingInstance> instances;
    std::vector<build::InstanceAudit> audits;
    build::BuildCounters counters;
    bool done = false;
  };
  std::vector<TaskResult> results(task_count);
  std::mutex mu;
  std::condition_variable cv;
  // Bound the number of completed-but-unwritten tasks to cap memory.
  const size_t window = std::max<size_t>(4, size_t(options.threads) * 4);
  size_t written = 0;

  std::atomic<size_t> next{0};
  auto worker = [&] {
    while (true) {
      size_t k = next.fetch_add(1);
      if (k >= task_count) return;
      {
        std::unique_lock<std::mutex> lock(mu);
        cv.wait(lock, [&] { return k < written + window; });
      }
      size_t doc_index = k / dupes;
      uint32_t dupe_index = uint32_t(k % dupes);
      TaskResult& r = results[k];
      r.instances = build::create_instances_for_document(
          docs, doc_index, dupe_index, options.config, vocab, r.counters,
          options.emit_units ? &r.audits : nullptr);
      {
        std::lock_guard<std::mutex> lock(mu);
        r.done = true;
      }
      cv.notify_all();
    }
  };

  rec::RecordHeader header;
  header.max_seq_len = options.config.max_seq_len;
  header.max_predictions_per_seq = options.config.effective_max_predictions();
  header.vocab_fingerprint = vocab.fingerprint();
  rec::RecordWriter writer(paths.records, options.format, header);

  std::optional<std::ofstream> sidecar;
  if (options.emit_units) {
    sidecar.emplace(paths.sidecar, std::ios::binary | std::ios::trunc);
    if (!*sidecar) {
      throw_io("build: cannot open sidecar '" + paths.sidecar + "'");
    }
  }

  std::vector<std::thread> pool;
  const uint32_t nworkers = std::max<uint32_t>(1, options.threads);
  for (uint32_t t = 0; t < nworkers; ++t) pool.emplace_back(worker);

  uint64_t record_index = 0;
  for (size_t k = 0; k < task_count; ++k) {
    {
      std::unique_lock<std::mutex> lock(mu);
      cv.wait(lock, [&] { return results[k].done; });
    }
    TaskResult& r = results[k];
    for (size_t i = 0; i < r.instances.size(); ++i) {
      writer.write(r.instances[i]);
      if (sidecar.has_value()) {
        *sidecar << stats::sidecar_line(record_index, r.audits[i]) << '\n';
      }
      ++record_index;
    }
    summary.instances += r.counters.instances;
    summary.nsp_fallbacks += r.counters.nsp_fallbacks;
    summary.skipped_degenerate += r.counters.skipped_degenerate;
    r = TaskResult{};  // free memory promptly
    {
      std::lock_guard<std::mutex> lock(mu);
      ++written;
    }
    cv.notify_all();
  }
  for (std::thread& t : pool) t.join();

  writer.finish();
  if (sidecar.has_value()) {
    sidecar->flush();
    if (!*sidecar) throw_io("build: write failure on '" + paths.sidecar + "'");
  }

  write_file_atomic(paths.manifest,
                    manifest_json(paths, options, summary, vocab.fingerprint()));
  log::info("build: %llu instances from %llu documents",
            (unsigned long long)summary.instances,
            (unsigned long long)summary.documents);
  return summary;
}

std::string manifest_json(const BuildPaths& paths, const BuildOptions& options,
                          const BuildSummary& summary,
                          uint64_t vocab_fingerprint) {
  const build::BuilderConfig& c = options.config;
  ordered_json j;
  j["tool"] = "wwm";
  j["version"] = kVersion;
  j["command"] = "build";
  ordered_json cfg;
  cfg["corpus"] = paths.corpus;
  cfg["vocab"] = paths.vocab;
  cfg["lexicon"] = paths.lexicon;
  cfg["mode"] = seg::mode_name(options.mode);
  cfg["format"] = rec::format_name(options.format);
  cfg["out"] = paths.records;
  cfg["lowercase"] = options.lowercase;
  cfg["emit_units"] = options.emit_units;
  cfg["max_seq_len"] = c.max_seq_len;
  cfg["max_predictions_per_seq"] = c.effective_max_predictions();
  cfg["masked_lm_prob"] = c.masked_lm_prob;
  cfg["mask_ratio"] = c.mask_ratio;
  cfg["random_ratio"] = c.random_ratio;
  cfg["keep_ratio"] = c.keep_ratio;
  cfg["short_seq_prob"] = c.short_seq_prob;
  cfg["nsp_random_prob"] = c.nsp_random_prob;
  cfg["dupe_factor"] = c.dupe_factor;
  cfg["random_seed"] = c.seed;
  j["config"] = std::move(cfg);
  j["vocab_fingerprint"] = rec::fingerprint_hex(vocab_fingerprint);
  ordered_json counters;
  counters["documents"] = summary.documents;
  counters["sentences"] = summary.sentences;
  counters["tokens"] = summary.tokens;
  counters["instances"] = summary.instances;
  counters["align_mismatches"] = summary.align_mismatches;
  counters["nsp_fallbacks"] = summary.nsp_fallbacks;
  counters["skipped_degenerate"] = summary.skipped_degenerate;
  j["counters"] = std::move(counters);
  return j.dump(2) + "\n";
}

void parse_manifest(const std::string& json_text, BuildPaths& paths,
                    BuildOptions& options) {
  try {
    ordered_json j = ordered_json::parse(json_text);
    const auto& cfg = j.at("config");
    paths.corpus = cfg.at("corpus").get<std::string>();
    paths.vocab = cfg.at("vocab").get<std::string>();
    paths.lexicon = cfg.at("lexicon").get<std::string>();
    paths.records = cfg.at("out").get<std::string>();
    if (!parse_mode(cfg.at("mode").get<std::string>(), options.mode)) {
      throw_data("manifest: unknown mode");
    }
    if (!rec::parse_format(cfg.at("format").get<std::string>(),
                           options.format)) {
      throw_data("manifest: unknown format");
    }
    options.lowercase = cfg.at("lowercase").get<bool>();
    options.emit_units = cfg.at("emit_units").get<bool>();
    build::BuilderConfig& c = options.config;
    c.max_seq_len = cfg.at("max_seq_len").get<uint32_t>();
    c.max_predictions_per_seq =
        cfg.at("max_predictions_per_seq").get<uint32_t>();
    c.masked_lm_prob = cfg.at("masked_lm_prob").get<double>();
    c.mask_ratio = cfg.at("mask_ratio").get<double>();
    c.random_ratio = cfg.at("random_ratio").get<double>();
    c.keep_ratio = cfg.at("keep_ratio").get<double>();
    c.short_seq_prob = cfg.at("short_seq_prob").get<double>();
    c.nsp_random_prob = cfg.at("nsp_random_prob").get<double>();
    c.dupe_factor = cfg.at("dupe_factor").get<uint32_t>();
    c.seed = cfg.at("random_seed").get<uint64_t>();
  } catch (const Error&) {
    throw;
  } catch (const std::exception& e) {
    throw_data(std::string("manifest: malformed: ") + e.what());
  }
}

void write_file_atomic(const std::string& path, std::string_view content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw_io("cannot open '" + tmp + "' for writing");
    out.write(content.data(), std::streamsize(content.size()));
    out.flush();
    if (!out) throw_io("write failure on '" + tmp + "'");
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0) {
    throw_io("cannot rename '" + tmp + "' to '" + path + "'");
  }
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw_io("cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw_io("read failure on '" + path + "'");
  return buf.str();
}

}  // namespace wwm::pipeline
