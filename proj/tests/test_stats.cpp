// Copyright 2026 the wwm-pipeline authors.
// SPDX-License-Identifier: Apache-2.0

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <doctest.h>

#include "wwm/builder.hpp"
#include "wwm/error.hpp"
#include "wwm/records.hpp"
#include "wwm/rng.hpp"
#include "wwm/stats.hpp"
#include "wwm/vocab.hpp"

using namespace wwm;
namespace fs = std::filesystem;

namespace {

fs::path temp_file(const std::string& name) {
  fs::path dir = fs::temp_directory_path() / "wwm_stats_tests";
  fs::create_directories(dir);
  return dir / name;
}

tok::Vocab stats_vocab() {
  // ids: 0..4 specials, 5 你 (cjk), 6 ab (latin), 7 ##lity (latin),
  // 8 "3" (other), 9 。 (other).
  return tok::Vocab::from_text(
      "[PAD]\n[UNK]\n[CLS]\n[SEP]\n[MASK]\n你\nab\n##lity\n3\n。\n");
}

build::TrainingInstance crafted(std::vector<int32_t> real_ids,
                                std::vector<int32_t> positions,
                                int32_t label) {
  build::TrainingInstance inst;
  const size_t L = 16, P = 3;
  for (size_t i = 0; i < L; ++i) {
    bool real = i < real_ids.size();
    inst.input_ids.push_back(real ? real_ids[i] : 0);
    inst.input_mask.push_back(real ? 1 : 0);
    inst.segment_ids.push_back(0);
  }
  for (size_t i = 0; i < P; ++i) {
    bool real = i < positions.size();
    inst.masked_lm_positions.push_back(real ? positions[i] : 0);
    inst.masked_lm_ids.push_back(real ? real_ids[size_t(positions[i])] : 0);
    inst.masked_lm_weights.push_back(real ? 1.0f : 0.0f);
  }
  inst.next_sentence_label = label;
  return inst;
}

build::InstanceAudit audit_of(std::vector<mask::WordUnit> units,
                              std::vector<uint32_t> positions,
                              std::vector<mask::Action> actions) {
  build::InstanceAudit a;
  a.units = std::move(units);
  a.positions = std::move(positions);
  a.actions = std::move(actions);
  return a;
}

void write_fixture(const fs::path& records, const fs::path& sidecar,
                   const tok::Vocab& v,
                   const std::vector<build::TrainingInstance>& instances,
                   const std::vector<build::InstanceAudit>& audits,
                   uint64_t fingerprint) {
  rec::RecordHeader h;
  h.max_seq_len = 16;
  h.max_predictions_per_seq = 3;
  h.vocab_fingerprint = fingerprint ? fingerprint : v.fingerprint();
  rec::RecordWriter w(records.string(), rec::Format::kJsonl, h);
  for (const auto& inst : instances) w.write(inst);
  w.finish();
  if (!sidecar.empty()) {
    std::ofstream out(sidecar, std::ios::binary | std::ios::trunc);
    for (size_t i = 0; i < audits.size(); ++i) {
      out << stats::sidecar_line(i, audits[i]) << '\n';
    }
  }
}

}  // namespace

TEST_SUITE("stats") {

TEST_CASE("sidecar lines round trip") {
  auto audit = audit_of({{1, 3}, {5, 6}}, {1, 2, 5},
                        {mask::Action::kMask, mask::Action::kRandom,
                         mask::Action::kKeep});
  std::string line = stats::sidecar_line(7, audit);
  CHECK(line.find("\"index\":7") != std::string::npos);
  auto parsed = stats::parse_sidecar_line(line, 7);
  CHECK(parsed.units == audit.units);
  CHECK(parsed.positions == audit.positions);
  CHECK(parsed.actions == audit.actions);

  CHECK_THROWS_AS((void)stats::parse_sidecar_line(line, 8), wwm::Error);
  CHECK_THROWS_AS((void)stats::parse_sidecar_line("{oops", 0), wwm::Error);
  CHECK_THROWS_AS(
      (void)stats::parse_sidecar_line(
          R"({"index":0,"units":[[1]],"positions":[],"actions":[]})", 0),
      wwm::Error);
}

TEST_CASE("analyze computes crafted counts exactly") {
  tok::Vocab v = stats_vocab();
  // [CLS] 你 ab [UNK] [SEP] ##lity 3 。 [SEP]  -> 9 unpadded
  auto a = crafted({2, 5, 6, 1, 3, 7, 8, 9, 3}, {1, 5}, 1);
  // [CLS] 你 你 [SEP] ab [SEP]                 -> 6 unpadded
  auto b = crafted({2, 5, 5, 3, 6, 3}, {1, 2}, 0);

  auto audit_a =
      audit_of({{1, 2}, {2, 3}, {3, 4}, {5, 6}, {6, 7}, {7, 8}}, {1, 5},
               {mask::Action::kMask, mask::Action::kKeep});
  auto audit_b = audit_of({{1, 3}, {4, 5}}, {1, 2},
                          {mask::Action::kMask, mask::Action::kRandom});

  fs::path records = temp_file("crafted.jsonl");
  fs::path sidecar = temp_file("crafted.units.jsonl");
  write_fixture(records, sidecar, v, {a, b}, {audit_a, audit_b}, 0);

  stats::StatsReport r = stats::analyze(records.string(), v, sidecar.string(), 1);
  CHECK(r.instance_count == 2);
  CHECK(r.unpadded_positions == 15);
  CHECK(r.max_unpadded_len == 9);
  CHECK(r.mean_unpadded_len == doctest::Approx(7.5));
  CHECK(r.masked_positions == 4);
  CHECK(r.nonspecial_positions == 9);
  CHECK(r.masked_rate == doctest::Approx(4.0 / 15.0));
  CHECK(r.masked_rate_nonspecial == doctest::Approx(4.0 / 9.0));
  CHECK(r.has_sidecar);
  CHECK(r.action_mask == 2);
  CHECK(r.action_random == 1);
  CHECK(r.action_keep == 1);
  CHECK(r.mask_action_ratio == doctest::Approx(0.5));
  CHECK(r.atomicity_violations == 0);
  CHECK(r.unk_tokens == 1);
  CHECK(r.unk_rate == doctest::Approx(1.0 / 9.0));
  CHECK(r.cjk_tokens == 3);
  CHECK(r.latin_tokens == 3);
  CHECK(r.other_tokens == 3);
  CHECK(r.nsp_positive == 1);
  CHECK(r.nsp_positive_rate == doctest::Approx(0.5));
  CHECK(r.vocab_fingerprint_matches);

  // Without the sidecar the masking action section goes quiet.
  stats::StatsReport bare = stats::analyze(records.string(), v, "", 1);
  CHECK_FALSE(bare.has_sidecar);
  CHECK(bare.action_mask == 0);
  CHECK(bare.masked_positions == 4);
  std::string json = stats::to_json(bare);
  CHECK(json.find("action_mask") == std::string::npos);
  CHECK(json.find("\"instance_count\": 2") != std::string::npos);
}

TEST_CASE("analyze flags a partially masked unit as an atomicity violation") {
  tok::Vocab v = stats_vocab();
  // Unit [1,3) but only position 1 masked.
  auto inst = crafted({2, 5, 5, 3, 6, 3}, {1}, 0);
  auto bad_audit =
      audit_of({{1, 3}, {4, 5}}, {1}, {mask::Action::kMask});

  fs::path records = temp_file("violation.jsonl");
  fs::path sidecar = temp_file("violation.units.jsonl");
  write_fixture(records, sidecar, v, {inst}, {bad_audit}, 0);

  stats::StatsReport r = stats::analyze(records.string(), v, sidecar.string(), 1);
  CHECK(r.atomicity_violations == 1);
}

TEST_CASE("analyze detects sidecar/record misalignment") {
  tok::Vocab v = stats_vocab();
  auto inst = crafted({2, 5, 3, 6, 3}, {1}, 0);
  auto good = audit_of({{1, 2}, {3, 4}}, {1}, {mask::Action::kMask});

  fs::path records = temp_file("misalign.jsonl");
  fs::path sidecar = temp_file("misalign.units.jsonl");
  write_fixture(records, sidecar, v, {inst, inst}, {good}, 0);  // one short
  CHECK_THROWS_AS(
      (void)stats::analyze(records.string(), v, sidecar.string(), 1),
      wwm::Error);

  // Now too many entries.
  std::ofstream out(sidecar, std::ios::binary | std::ios::app);
  out << stats::sidecar_line(1, good) << '\n'
      << stats::sidecar_line(2, good) << '\n';
  out.close();
  CHECK_THROWS_AS(
      (void)stats::analyze(records.string(), v, sidecar.string(), 1),
      wwm::Error);
}

TEST_CASE("analyze notices a foreign vocab fingerprint") {
  tok::Vocab v = stats_vocab();
  auto inst = crafted({2, 5, 3, 6, 3}, {1}, 0);
  fs::path records = temp_file("foreignfp.jsonl");
  write_fixture(records, {}, v, {inst}, {}, 0xDEAD5EED00000001ULL);
  stats::StatsReport r = stats::analyze(records.string(), v, "", 1);
  CHECK_FALSE(r.vocab_fingerprint_matches);
}

TEST_CASE("analyze is independent of thread count") {
  tok::Vocab v = stats_vocab();
  rng::Rng rng(0x57A7);
  std::vector<build::TrainingInstance> instances;
  std::vector<build::InstanceAudit> audits;
  for (int i = 0; i < 500; ++i) {
    uint32_t len = 5 + rng.next_below(10);
    std::vector<int32_t> ids = {2};
    for (uint32_t k = 1; k + 2 < len; ++k) {
      ids.push_back(int32_t(5 + rng.next_below(5)));
    }
    ids.push_back(3);
    ids.push_back(int32_t(5 + rng.next_below(5)));
    ids.push_back(3);
    std::vector<int32_t> positions = {int32_t(1 + rng.next_below(2))};
    instances.push_back(crafted(ids, positions, int32_t(rng.next_below(2))));
    audits.push_back(audit_of({{uint32_t(positions[0]), uint32_t(positions[0]) + 1}},
                              {uint32_t(positions[0])}, {mask::Action::kMask}));
  }
  fs::path records = temp_file("threads.jsonl");
  fs::path sidecar = temp_file("threads.units.jsonl");
  write_fixture(records, sidecar, v, instances, audits, 0);

  stats::StatsReport r1 = stats::analyze(records.string(), v, sidecar.string(), 1);
  stats::StatsReport r4 = stats::analyze(records.string(), v, sidecar.string(), 4);
  CHECK(stats::to_json(r1) == stats::to_json(r4));
  CHECK(r1.instance_count == 500);
}

}  // TEST_SUITE
