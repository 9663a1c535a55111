// Copyright 2026 the wwm-pipeline authors.
// SPDX-License-Identifier: Apache-2.0

#include <filesystem>
#include <fstream>
#include <set>
#include <string>
#include <vector>

#include <doctest.h>

#include "wwm/error.hpp"
#include "wwm/pipeline.hpp"
#include "wwm/records.hpp"
#include "wwm/stats.hpp"
#include "wwm/text_clean.hpp"
#include "wwm/unicode.hpp"
#include "wwm/vocab.hpp"

using namespace wwm;
namespace fs = std::filesystem;

namespace {

const char* kCorpus =
    "使用语言模型来预测下一个词的probability。\n"
    "我们提出了全词掩码的方法！\n"
    "这样可以缓解只掩盖部分子词的问题；\n"
    "效果更好。\n"
    "模型在大规模语料上训练。\n"
    "\n"
    "自然语言处理是人工智能的重要方向。\n"
    "深度学习改变了这个领域。\n"
    "预训练模型提升了下游任务表现。\n";

const char* kLexicon =
    "使用\n语言\n模型\n预测\n一个\n我们\n提出\n全词\n掩码\n方法\n这样\n"
    "可以\n缓解\n掩盖\n部分\n子词\n问题\n效果\n更好\n大规模\n语料\n训练\n"
    "自然\n语言处理\n人工智能\n重要\n方向\n深度\n学习\n改变\n这个\n领域\n"
    "预训练\n提升\n下游\n任务\n表现\n";

// Vocab covering every character of the corpus (plus subwords for the one
// Latin word), so tokenization is [UNK]-free.
std::string corpus_vocab_text() {
  std::string text = "[PAD]\n[UNK]\n[CLS]\n[SEP]\n[MASK]\n";
  std::set<uint32_t> seen;
  std::vector<uint32_t> cps;
  size_t bad;
  REQUIRE(uni::decode_string(kCorpus, cps, bad));
  for (uint32_t cp : cps) {
    if (cp == '\n' || (cp >= 'a' && cp <= 'z')) continue;
    if (seen.insert(cp).second) {
      std::string t;
      uni::append_utf8(t, cp);
      text += t + "\n##" + t + "\n";
    }
  }
  text += "pro\n##babi\n##lity\n";
  return text;
}

struct Fixture {
  fs::path dir;
  pipeline::BuildPaths paths;

  explicit Fixture(const std::string& name) {
    dir = fs::temp_directory_path() / "wwm_pipeline_tests" / name;
    fs::create_directories(dir);
    paths.corpus = (dir / "corpus.txt").string();
    paths.vocab = (dir / "vocab.txt").string();
    paths.lexicon = (dir / "lexicon.txt").string();
    paths.records = (dir / "records.out").string();
    pipeline::write_file_atomic(paths.corpus, kCorpus);
    pipeline::write_file_atomic(paths.vocab, corpus_vocab_text());
    pipeline::write_file_atomic(paths.lexicon, kLexicon);
  }
};

std::string slurp(const std::string& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  return std::string(std::istreambuf_iterator<char>(in),
                     std::istreambuf_iterator<char>());
}

pipeline::BuildOptions small_options() {
  pipeline::BuildOptions opt;
  opt.config.max_seq_len = 32;
  opt.config.dupe_factor = 3;
  opt.emit_units = true;
  return opt;
}

}  // namespace

TEST_SUITE("pipeline") {

TEST_CASE("end-to-end build produces consistent records, sidecar, manifest") {
  Fixture fx("e2e");
  pipeline::BuildOptions opt = small_options();
  pipeline::BuildSummary s = pipeline::run_build(fx.paths, opt);

  CHECK(s.documents == 2);
  CHECK(s.sentences == 8);
  CHECK(s.tokens > 50);
  CHECK(s.instances > 0);
  CHECK(s.align_mismatches == 0);

  // Records readable, count matches, header sane.
  rec::RecordReader reader(fx.paths.records);
  CHECK(reader.header().max_seq_len == 32);
  CHECK(reader.header().max_predictions_per_seq == 5);  // ceil(32 * 0.15)
  build::TrainingInstance inst;
  uint64_t n = 0;
  while (reader.next(inst)) {
    CHECK(inst.input_ids.size() == 32);
    CHECK(inst.input_ids[0] == 2);  // [CLS]
    ++n;
  }
  CHECK(n == s.instances);

  // Stats over the output: whole-word atomicity must hold everywhere and
  // the vocab fingerprint must match.
  tok::Vocab vocab = tok::Vocab::load(fx.paths.vocab);
  stats::StatsReport r =
      stats::analyze(fx.paths.records, vocab,
                     fx.paths.records + ".units.jsonl", 2);
  CHECK(r.instance_count == s.instances);
  CHECK(r.atomicity_violations == 0);
  CHECK(r.unk_tokens == 0);
  CHECK(r.vocab_fingerprint_matches);
  CHECK(r.masked_positions > 0);

  // The manifest reproduces the effective configuration.
  std::string manifest = slurp(fx.paths.records + ".manifest.json");
  pipeline::BuildPaths paths2;
  pipeline::BuildOptions opt2;
  pipeline::parse_manifest(manifest, paths2, opt2);
  CHECK(paths2.corpus == fx.paths.corpus);
  CHECK(paths2.records == fx.paths.records);
  CHECK(opt2.config.max_seq_len == 32);
  CHECK(opt2.config.dupe_factor == 3);
  CHECK(opt2.config.max_predictions_per_seq == 5);  // effective value pinned
  CHECK(opt2.emit_units);
}

TEST_CASE("output bytes are independent of thread count") {
  Fixture fx1("threads1");
  Fixture fx4("threads4");
  pipeline::BuildOptions opt = small_options();

  opt.threads = 1;
  pipeline::run_build(fx1.paths, opt);
  opt.threads = 4;
  pipeline::run_build(fx4.paths, opt);

  CHECK(slurp(fx1.paths.records) == slurp(fx4.paths.records));
  CHECK(slurp(fx1.paths.records + ".units.jsonl") ==
        slurp(fx4.paths.records + ".units.jsonl"));
}

TEST_CASE("a manifest re-run reproduces the records byte for byte") {
  Fixture fx("manifest");
  pipeline::BuildOptions opt = small_options();
  opt.config.seed = 424242;
  pipeline::run_build(fx.paths, opt);
  std::string original = slurp(fx.paths.records);

  pipeline::BuildPaths paths2;
  pipeline::BuildOptions opt2;
  pipeline::parse_manifest(slurp(fx.paths.records + ".manifest.json"), paths2,
                           opt2);
  paths2.records = (fx.dir / "rerun.out").string();
  opt2.threads = 3;
  pipeline::run_build(paths2, opt2);
  CHECK(slurp(paths2.records) == original);
}

TEST_CASE("binary format round trips through the full pipeline") {
  Fixture fx("binfmt");
  pipeline::BuildOptions opt = small_options();
  opt.format = rec::Format::kBinary;
  pipeline::BuildSummary s = pipeline::run_build(fx.paths, opt);

  rec::RecordReader reader(fx.paths.records);
  CHECK(reader.format() == rec::Format::kBinary);
  build::TrainingInstance inst;
  uint64_t n = 0;
  while (reader.next(inst)) ++n;
  CHECK(n == s.instances);
}

TEST_CASE("char mode yields only single-token units") {
  Fixture fx("charmode");
  pipeline::BuildOptions opt = small_options();
  opt.mode = seg::Mode::kChars;
  pipeline::run_build(fx.paths, opt);

  std::ifstream sidecar(fx.paths.records + ".units.jsonl");
  REQUIRE(sidecar.good());
  std::string line;
  uint64_t entries = 0;
  while (std::getline(sidecar, line)) {
    auto audit = stats::parse_sidecar_line(line, entries);
    for (const auto& u : audit.units) CHECK(u.size() == 1);
    ++entries;
  }
  CHECK(entries > 0);
}

TEST_CASE("presegmented corpus flows through") {
  Fixture fx("preseg");
  // Space-delimited words, one sentence per line.
  pipeline::write_file_atomic(fx.paths.corpus,
                              "使用 语言 模型 来 预测 下 一个 词 的 "
                              "probability 。\n我们 提出 了 全词 掩码 的 方法 "
                              "！\n\n自然 语言处理 是 人工智能 的 重要 方向 "
                              "。\n深度 学习 改变 了 这个 领域 。\n");
  pipeline::BuildOptions opt = small_options();
  opt.mode = seg::Mode::kPresegmented;
  pipeline::BuildSummary s = pipeline::run_build(fx.paths, opt);
  CHECK(s.documents == 2);
  CHECK(s.align_mismatches == 0);
  CHECK(s.instances > 0);

  tok::Vocab vocab = tok::Vocab::load(fx.paths.vocab);
  stats::StatsReport r = stats::analyze(
      fx.paths.records, vocab, fx.paths.records + ".units.jsonl", 1);
  CHECK(r.atomicity_violations == 0);
}

TEST_CASE("tokenize_corpus drops empty sentences and documents") {
  tok::Vocab vocab = tok::Vocab::from_text(corpus_vocab_text());
  tok::Tokenizer tokenizer(vocab);
  seg::Lexicon lexicon = seg::Lexicon::from_text(kLexicon);
  // Middle document tokenizes to nothing (whitespace only).
  std::vector<std::vector<std::string>> documents = {
      {"使用语言模型。", "   "}, {"  "}, {"效果更好。"}};
  uint64_t mismatches = 0, tokens = 0;
  auto docs = pipeline::tokenize_corpus(documents, tokenizer, &lexicon,
                                        seg::Mode::kFmm, 1, mismatches, tokens);
  REQUIRE(docs.size() == 2);
  CHECK(docs[0].sentences.size() == 1);
  CHECK(docs[1].sentences.size() == 1);
  CHECK(tokens == 12);  // 7 pieces + 5 pieces
}

TEST_CASE("error taxonomy: usage, data, and io failures") {
  Fixture fx("errors");
  pipeline::BuildOptions opt = small_options();

  // fmm without a lexicon is a usage error.
  pipeline::BuildPaths no_lex = fx.paths;
  no_lex.lexicon.clear();
  try {
    pipeline::run_build(no_lex, opt);
    FAIL("expected usage error");
  } catch (const wwm::Error& e) {
    CHECK(e.kind() == wwm::ErrorKind::kUsage);
    CHECK(e.exit_code() == 1);
  }

  // An empty corpus is a data error.
  pipeline::BuildPaths empty = fx.paths;
  empty.corpus = (fx.dir / "empty.txt").string();
  pipeline::write_file_atomic(empty.corpus, "\n\n");
  try {
    pipeline::run_build(empty, opt);
    FAIL("expected data error");
  } catch (const wwm::Error& e) {
    CHECK(e.kind() == wwm::ErrorKind::kData);
    CHECK(e.exit_code() == 2);
  }

  // A missing input is an io error.
  pipeline::BuildPaths missing = fx.paths;
  missing.corpus = (fx.dir / "nope.txt").string();
  try {
    pipeline::run_build(missing, opt);
    FAIL("expected io error");
  } catch (const wwm::Error& e) {
    CHECK(e.kind() == wwm::ErrorKind::kIo);
    CHECK(e.exit_code() == 3);
  }

  // Invalid UTF-8 in the corpus surfaces as a data error naming the doc.
  pipeline::BuildPaths bad = fx.paths;
  bad.corpus = (fx.dir / "bad.txt").string();
  pipeline::write_file_atomic(bad.corpus, "使用语言模型。\xFF\xFE\n");
  try {
    pipeline::run_build(bad, opt);
    FAIL("expected data error");
  } catch (const wwm::Error& e) {
    CHECK(e.kind() == wwm::ErrorKind::kData);
    CHECK(std::string(e.what()).find("document 0") != std::string::npos);
  }
}

}  // TEST_SUITE
