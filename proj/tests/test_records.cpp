// Copyright 2026 the wwm-pipeline authors.
// SPDX-License-Identifier: Apache-2.0

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <doctest.h>

#include "wwm/builder.hpp"
#include "wwm/error.hpp"
#include "wwm/records.hpp"
#include "wwm/rng.hpp"

using namespace wwm;
namespace fs = std::filesystem;

namespace {

fs::path temp_file(const std::string& name) {
  fs::path dir = fs::temp_directory_path() / "wwm_records_tests";
  fs::create_directories(dir);
  return dir / name;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  return std::string(std::istreambuf_iterator<char>(in),
                     std::istreambuf_iterator<char>());
}

// Deterministic synthetic instances matching header dims L=16, P=3.
std::vector<build::TrainingInstance> make_instances(size_t n) {
  std::vector<build::TrainingInstance> out;
  rng::Rng rng(0x5EC0);
  for (size_t r = 0; r < n; ++r) {
    build::TrainingInstance inst;
    uint32_t len = 8 + rng.next_below(9);  // 8..16 real tokens
    for (uint32_t i = 0; i < 16; ++i) {
      bool real = i < len;
      inst.input_ids.push_back(real ? int32_t(5 + rng.next_below(100)) : 0);
      inst.input_mask.push_back(real ? 1 : 0);
      inst.segment_ids.push_back(real && i > len / 2 ? 1 : 0);
    }
    uint32_t preds = 1 + rng.next_below(3);
    for (uint32_t i = 0; i < 3; ++i) {
      bool real = i < preds;
      inst.masked_lm_positions.push_back(real ? int32_t(1 + i) : 0);
      inst.masked_lm_ids.push_back(real ? int32_t(5 + rng.next_below(100)) : 0);
      inst.masked_lm_weights.push_back(real ? 1.0f : 0.0f);
    }
    inst.next_sentence_label = int32_t(rng.next_below(2));
    out.push_back(std::move(inst));
  }
  return out;
}

rec::RecordHeader small_header() {
  rec::RecordHeader h;
  h.max_seq_len = 16;
  h.max_predictions_per_seq = 3;
  h.vocab_fingerprint = 0x0123456789ABCDEFULL;
  return h;
}

bool same_instance(const build::TrainingInstance& a,
                   const build::TrainingInstance& b) {
  return a.input_ids == b.input_ids && a.input_mask == b.input_mask &&
         a.segment_ids == b.segment_ids &&
         a.masked_lm_positions == b.masked_lm_positions &&
         a.masked_lm_ids == b.masked_lm_ids &&
         a.masked_lm_weights == b.masked_lm_weights &&
         a.next_sentence_label == b.next_sentence_label;
}

}  // namespace

TEST_SUITE("records") {

TEST_CASE("fingerprint hex round trip") {
  CHECK(rec::fingerprint_hex(0x0123456789ABCDEFULL) == "0123456789abcdef");
  CHECK(rec::fingerprint_hex(0) == "0000000000000000");
  uint64_t fp = 0;
  CHECK(rec::parse_fingerprint("0123456789abcdef", fp));
  CHECK(fp == 0x0123456789ABCDEFULL);
  CHECK_FALSE(rec::parse_fingerprint("0123456789ABCDEF", fp));  // lowercase only
  CHECK_FALSE(rec::parse_fingerprint("abc", fp));
  CHECK_FALSE(rec::parse_fingerprint("0123456789abcdeg", fp));
}

TEST_CASE("format names parse") {
  rec::Format f;
  CHECK(rec::parse_format("jsonl", f));
  CHECK(f == rec::Format::kJsonl);
  CHECK(rec::parse_format("binary", f));
  CHECK(f == rec::Format::kBinary);
  CHECK_FALSE(rec::parse_format("tfrecord", f));
}

TEST_CASE("round trips in both formats preserve every field") {
  auto instances = make_instances(25);
  for (rec::Format fmt : {rec::Format::kJsonl, rec::Format::kBinary}) {
    fs::path path = temp_file(std::string("roundtrip.") + rec::format_name(fmt));
    {
      rec::RecordWriter w(path.string(), fmt, small_header());
      for (const auto& inst : instances) w.write(inst);
      w.finish();
      CHECK(w.records_written() == instances.size());
    }
    rec::RecordReader r(path.string());
    CHECK(r.format() == fmt);
    CHECK(r.header().format_version == 1);
    CHECK(r.header().max_seq_len == 16);
    CHECK(r.header().max_predictions_per_seq == 3);
    CHECK(r.header().vocab_fingerprint == 0x0123456789ABCDEFULL);

    build::TrainingInstance got;
    size_t count = 0;
    while (r.next(got)) {
      REQUIRE(count < instances.size());
      CHECK(same_instance(got, instances[count]));
      ++count;
    }
    CHECK(count == instances.size());
  }
}

TEST_CASE("cross-format equality: jsonl and binary decode identically") {
  auto instances = make_instances(10);
  fs::path pj = temp_file("cross.jsonl");
  fs::path pb = temp_file("cross.bin");
  {
    rec::RecordWriter wj(pj.string(), rec::Format::kJsonl, small_header());
    rec::RecordWriter wb(pb.string(), rec::Format::kBinary, small_header());
    for (const auto& inst : instances) {
      wj.write(inst);
      wb.write(inst);
    }
    wj.finish();
    wb.finish();
  }
  rec::RecordReader rj(pj.string());
  rec::RecordReader rb(pb.string());
  build::TrainingInstance a, b;
  while (true) {
    bool more_j = rj.next(a);
    bool more_b = rb.next(b);
    CHECK(more_j == more_b);
    if (!more_j) break;
    CHECK(same_instance(a, b));
  }
}

TEST_CASE("jsonl emits the canonical key order") {
  fs::path path = temp_file("keyorder.jsonl");
  {
    rec::RecordWriter w(path.string(), rec::Format::kJsonl, small_header());
    w.write(make_instances(1)[0]);
    w.finish();
  }
  std::string content = slurp(path);
  size_t second_line = content.find('\n') + 1;
  std::string record = content.substr(second_line);
  const char* keys[] = {"\"input_ids\"",           "\"input_mask\"",
                        "\"segment_ids\"",         "\"masked_lm_positions\"",
                        "\"masked_lm_ids\"",       "\"masked_lm_weights\"",
                        "\"next_sentence_label\""};
  size_t last = 0;
  for (const char* key : keys) {
    size_t at = record.find(key);
    REQUIRE(at != std::string::npos);
    CHECK(at > last);
    last = at;
  }
  CHECK(content.rfind("{\"__header__\":{\"format_version\":1", 0) == 0);
}

TEST_CASE("header-only files read back as zero records") {
  for (rec::Format fmt : {rec::Format::kJsonl, rec::Format::kBinary}) {
    fs::path path = temp_file(std::string("empty.") + rec::format_name(fmt));
    {
      rec::RecordWriter w(path.string(), fmt, small_header());
      w.finish();
    }
    rec::RecordReader r(path.string());
    build::TrainingInstance inst;
    CHECK_FALSE(r.next(inst));
  }
}

TEST_CASE("writer rejects mismatched dimensions, naming the record") {
  fs::path path = temp_file("dims.jsonl");
  rec::RecordWriter w(path.string(), rec::Format::kJsonl, small_header());
  w.write(make_instances(1)[0]);
  build::TrainingInstance bad = make_instances(1)[0];
  bad.input_ids.pop_back();
  try {
    w.write(bad);
    FAIL("expected a data error");
  } catch (const wwm::Error& e) {
    CHECK(e.kind() == wwm::ErrorKind::kData);
    CHECK(std::string(e.what()).find("record 1") != std::string::npos);
  }
}

TEST_CASE("truncated binary records are reported with their index") {
  auto instances = make_instances(3);
  fs::path path = temp_file("trunc.bin");
  {
    rec::RecordWriter w(path.string(), rec::Format::kBinary, small_header());
    for (const auto& inst : instances) w.write(inst);
    w.finish();
  }
  std::string bytes = slurp(path);
  // Chop the last record mid-payload.
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out.write(bytes.data(), std::streamsize(bytes.size() - 40));
  out.close();

  rec::RecordReader r(path.string());
  build::TrainingInstance inst;
  CHECK(r.next(inst));
  CHECK(r.next(inst));
  try {
    r.next(inst);
    FAIL("expected a data error");
  } catch (const wwm::Error& e) {
    CHECK(e.kind() == wwm::ErrorKind::kData);
    CHECK(std::string(e.what()).find("record 2") != std::string::npos);
    CHECK(std::string(e.what()).find("truncated") != std::string::npos);
  }
}

TEST_CASE("malformed jsonl records are reported with their index") {
  auto instances = make_instances(2);
  fs::path path = temp_file("garbled.jsonl");
  {
    rec::RecordWriter w(path.string(), rec::Format::kJsonl, small_header());
    for (const auto& inst : instances) w.write(inst);
    w.finish();
  }
  std::ofstream out(path, std::ios::binary | std::ios::app);
  out << "{\"input_ids\": [1, 2,\n";  // cut off mid-object
  out.close();

  rec::RecordReader r(path.string());
  build::TrainingInstance inst;
  CHECK(r.next(inst));
  CHECK(r.next(inst));
  CHECK_THROWS_AS((void)r.next(inst), wwm::Error);
}

TEST_CASE("reader rejects unknown versions and missing headers") {
  fs::path path = temp_file("badver.jsonl");
  {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << "{\"__header__\":{\"format_version\":2,\"max_seq_len\":16,"
           "\"max_predictions_per_seq\":3,"
           "\"vocab_fingerprint\":\"0000000000000000\"}}\n";
  }
  CHECK_THROWS_AS(rec::RecordReader(path.string()), wwm::Error);

  fs::path path2 = temp_file("noheader.jsonl");
  {
    std::ofstream out(path2, std::ios::binary | std::ios::trunc);
    out << "{\"input_ids\":[]}\n";
  }
  CHECK_THROWS_AS(rec::RecordReader(path2.string()), wwm::Error);

  CHECK_THROWS_AS(rec::RecordReader(temp_file("missing.bin").string()),
                  wwm::Error);
}

TEST_CASE("writing the same instances twice is byte-identical") {
  auto instances = make_instances(12);
  for (rec::Format fmt : {rec::Format::kJsonl, rec::Format::kBinary}) {
    fs::path p1 = temp_file(std::string("det1.") + rec::format_name(fmt));
    fs::path p2 = temp_file(std::string("det2.") + rec::format_name(fmt));
    for (const fs::path& p : {p1, p2}) {
      rec::RecordWriter w(p.string(), fmt, small_header());
      for (const auto& inst : instances) w.write(inst);
      w.finish();
    }
    CHECK(slurp(p1) == slurp(p2));
  }
}

}  // TEST_SUITE
