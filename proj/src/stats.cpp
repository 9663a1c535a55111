// Copyright 2026 the wwm-pipeline authors.
// SPDX-License-Identifier: Apache-2.0

#include "wwm/stats.hpp"

#include <algorithm>
#include <fstream>
#include <future>
#include <vector>

#include <json.hpp>

#include "wwm/error.hpp"
#include "wwm/log.hpp"
#include "wwm/records.hpp"
#include "wwm/tokenizer.hpp"
#include "wwm/unicode.hpp"

namespace wwm::stats {
namespace {

using ordered_json = nlohmann::ordered_json;

const char* action_name(mask::Action a) {
  switch (a) {
    case mask::Action::kMask: return "mask";
    case mask::Action::kRandom: return "random";
    case mask::Action::kKeep: return "keep";
  }
  return "?";
}

bool parse_action(std::string_view name, mask::Action& a) {
  if (name == "mask") {
    a = mask::Action::kMask;
  } else if (name == "random") {
    a = mask::Action::kRandom;
  } else if (name == "keep") {
    a = mask::Action::kKeep;
  } else {
    return false;
  }
  return true;
}

// Integer-only accumulator; merging is summation, so any partitioning of
// the records produces the same totals.
struct Accum {
  uint64_t instances = 0;
  uint64_t unpadded = 0;
  uint32_t max_unpadded = 0;
  uint64_t masked = 0;
  uint64_t nonspecial = 0;
  uint64_t action_mask = 0, action_random = 0, action_keep = 0;
  uint64_t atomicity_violations = 0;
  uint64_t unk = 0;
  uint64_t cjk = 0, latin = 0, other = 0;
  uint64_t nsp_positive = 0;

  void merge(const Accum& o) {
    instances += o.instances;
    unpadded += o.unpadded;
    max_unpadded = std::max(max_unpadded, o.max_unpadded);
    masked += o.masked;
    nonspecial += o.nonspecial;
    action_mask += o.action_mask;
    action_random += o.action_random;
    action_keep += o.action_keep;
    atomicity_violations += o.atomicity_violations;
    unk += o.unk;
    cjk += o.cjk;
    latin += o.latin;
    other += o.other;
    nsp_positive += o.nsp_positive;
  }
};

// Script bucket of a vocab surface form, keyed on its first codepoint.
enum class Script { kCjk, kLatin, kOther };

Script script_of(const std::string& token) {
  std::string_view s = token;
  if (s.rfind("##", 0) == 0) s.remove_prefix(2);
  uni::Decoded d = uni::decode_utf8(s.data(), s.size());
  if (d.len == 0) return Script::kOther;
  uint32_t cp = d.cp;
  if (tok::is_cjk_char(cp)) return Script::kCjk;
  uint32_t lower = cp | 0x20;
  if (lower >= 'a' && lower <= 'z') return Script::kLatin;
  if ((cp >= 0xC0 && cp <= 0x24F) && uni::is_punctuation_category(cp) == false) {
    return Script::kLatin;  // Latin-1 supplement / Latin Extended letters
  }
  return Script::kOther;
}

void accumulate(Accum& acc, const build::TrainingInstance& inst,
                const build::InstanceAudit* audit, const tok::Vocab& vocab) {
  const tok::SpecialIds& sp = vocab.specials();
  ++acc.instances;
  acc.nsp_positive += inst.next_sentence_label == 1 ? 1 : 0;

  uint32_t unpadded = 0;
  for (size_t i = 0; i < inst.input_mask.size(); ++i) {
    if (inst.input_mask[i] == 0) continue;
    ++unpadded;
    int32_t id = inst.input_ids[i];
    if (id == sp.cls || id == sp.sep) continue;
    ++acc.nonspecial;
    if (id == sp.unk) ++acc.unk;
    switch (script_of(vocab.token(id))) {
      case Script::kCjk: ++acc.cjk; break;
      case Script::kLatin: ++acc.latin; break;
      case Script::kOther: ++acc.other; break;
    }
  }
  acc.unpadded += unpadded;
  acc.max_unpadded = std::max(acc.max_unpadded, unpadded);

  uint64_t masked_here = 0;
  for (size_t i = 0; i < inst.masked_lm_weights.size(); ++i) {
    if (inst.masked_lm_weights[i] != 0.0f) ++masked_here;
  }
  acc.masked += masked_here;

  if (audit != nullptr) {
    for (mask::Action a : audit->actions) {
      switch (a) {
        case mask::Action::kMask: ++acc.action_mask; break;
        case mask::Action::kRandom: ++acc.action_random; break;
        case mask::Action::kKeep: ++acc.action_keep; break;
      }
    }
    // Whole-word atomicity: every unit is fully masked or fully unmasked.
    for (const mask::WordUnit& u : audit->units) {
      uint32_t covered = 0;
      for (uint32_t i = 0; i < masked_here; ++i) {
        uint32_t pos = uint32_t(inst.masked_lm_positions[i]);
        if (pos >= u.begin && pos < u.end) ++covered;
      }
      if (covered != 0 && covered != u.size()) ++acc.atomicity_violations;
    }
  }
}

}  // namespace

std::string sidecar_line(uint64_t index, const build::InstanceAudit& audit) {
  ordered_json j;
  j["index"] = index;
  ordered_json units = ordered_json::array();
  for (const mask::WordUnit& u : audit.units) {
    units.push_back({u.begin, u.end});
  }
  j["units"] = std::move(units);
  j["positions"] = audit.positions;
  ordered_json actions = ordered_json::array();
  for (mask::Action a : audit.actions) actions.push_back(action_name(a));
  j["actions"] = std::move(actions);
  return j.dump();
}

build::InstanceAudit parse_sidecar_line(std::string_view line,
                                        uint64_t expect_index) {
  build::InstanceAudit audit;
  try {
    ordered_json j = ordered_json::parse(line);
    uint64_t index = j.at("index").get<uint64_t>();
    if (index != expect_index) {
      throw_data("sidecar: entry index " + std::to_string(index) +
                 " does not match record " + std::to_string(expect_index));
    }
    for (const auto& u : j.at("units")) {
      if (!u.is_array() || u.size() != 2) {
        throw_data("sidecar: malformed unit in entry " +
                   std::to_string(expect_index));
      }
      audit.units.push_back(
          {u[0].get<uint32_t>(), u[1].get<uint32_t>()});
    }
    audit.positions = j.at("positions").get<std::vector<uint32_t>>();
    for (const auto& a : j.at("actions")) {
      mask::Action action;
      if (!parse_action(a.get<std::string>(), action)) {
        throw_data("sidecar: unknown action in entry " +
                   std::to_string(expect_index));
      }
      audit.actions.push_back(action);
    }
  } catch (const Error&) {
    throw;
  } catch (const std::exception& e) {
    throw_data("sidecar: entry " + std::to_string(expect_index) +
               " is malformed: " + e.what());
  }
  return audit;
}

StatsReport analyze(const std::string& records_path, const tok::Vocab& vocab,
                    const std::string& sidecar_path, uint32_t threads) {
  rec::RecordReader reader(records_path);
  if (threads < 1) threads = 1;

  std::optional<std::ifstream> sidecar;
  if (!sidecar_path.empty()) {
    sidecar.emplace(sidecar_path, std::ios::binary);
    if (!*sidecar) throw_io("sidecar: cannot open '" + sidecar_path + "'");
  }

  Accum total;
  constexpr size_t kBatch = 2048;
  std::vector<build::TrainingInstance> instances;
  std::vector<build::InstanceAudit> audits;
  instances.reserve(kBatch);
  uint64_t index = 0;

  auto flush_batch = [&] {
    if (instances.empty()) return;
    size_t parts = std::min<size_t>(threads, instances.size());
    std::vector<std::future<Accum>> futures;
    size_t per = (instances.size() + parts - 1) / parts;
    for (size_t p = 0; p < parts; ++p) {
      size_t lo = p * per;
      size_t hi = std::min(instances.size(), lo + per);
      if (lo >= hi) break;
      futures.push_back(std::async(std::launch::async, [&, lo, hi] {
        Accum acc;
        for (size_t k = lo; k < hi; ++k) {
          accumulate(acc, instances[k],
                     sidecar.has_value() ? &audits[k] : nullptr, vocab);
        }
        return acc;
      }));
    }
    for (auto& f : futures) total.merge(f.get());
    instances.clear();
    audits.clear();
  };

  build::TrainingInstance inst;
  while (reader.next(inst)) {
    if (sidecar.has_value()) {
      std::string line;
      if (!std::getline(*sidecar, line)) {
        throw_data("sidecar: fewer entries than records (record " +
                   std::to_string(index) + ")");
      }
      audits.push_back(parse_sidecar_line(line, index));
    }
    instances.push_back(std::move(inst));
    inst = build::TrainingInstance{};
    ++index;
    if (instances.size() >= kBatch) flush_batch();
  }
  flush_batch();

  if (sidecar.has_value()) {
    std::string extra;
    if (std::getline(*sidecar, extra) && !extra.empty()) {
      throw_data("sidecar: more entries than records");
    }
  }

  StatsReport report;
  report.instance_count = total.instances;
  report.unpadded_positions = total.unpadded;
  report.max_unpadded_len = total.max_unpadded;
  report.mean_unpadded_len =
      total.instances ? double(total.unpadded) / double(total.instances) : 0.0;
  report.masked_positions = total.masked;
  report.nonspecial_positions = total.nonspecial;
  report.masked_rate =
      total.unpadded ? double(total.masked) / double(total.unpadded) : 0.0;
  report.masked_rate_nonspecial =
      total.nonspecial ? double(total.masked) / double(total.nonspecial) : 0.0;

  report.has_sidecar = sidecar.has_value();
  report.action_mask = total.action_mask;
  report.action_random = total.action_random;
  report.action_keep = total.action_keep;
  uint64_t actions = total.action_mask + total.action_random + total.action_keep;
  if (actions > 0) {
    report.mask_action_ratio = double(total.action_mask) / double(actions);
    report.random_action_ratio = double(total.action_random) / double(actions);
    report.keep_action_ratio = double(total.action_keep) / double(actions);
  }
  report.atomicity_violations = total.atomicity_violations;

  report.unk_tokens = total.unk;
  report.unk_rate =
      total.nonspecial ? double(total.unk) / double(total.nonspecial) : 0.0;
  report.cjk_tokens = total.cjk;
  report.latin_tokens = total.latin;
  report.other_tokens = total.other;

  report.nsp_positive = total.nsp_positive;
  report.nsp_positive_rate =
      total.instances ? double(total.nsp_positive) / double(total.instances)
                      : 0.0;

  report.vocab_fingerprint_matches =
      reader.header().vocab_fingerprint == vocab.fingerprint();
  if (!report.vocab_fingerprint_matches) {
    log::warn("stats: record file was built against a different vocab "
              "(fingerprint %s vs %s)",
              rec::fingerprint_hex(reader.header().vocab_fingerprint).c_str(),
              rec::fingerprint_hex(vocab.fingerprint()).c_str());
  }
  return report;
}

std::string to_json(const StatsReport& r) {
  ordered_json j;
  j["instance_count"] = r.instance_count;
  j["unpadded_positions"] = r.unpadded_positions;
  j["max_unpadded_len"] = r.max_unpadded_len;
  j["mean_unpadded_len"] = r.mean_unpadded_len;
  j["masked_positions"] = r.masked_positions;
  j["nonspecial_positions"] = r.nonspecial_positions;
  j["masked_rate"] = r.masked_rate;
  j["masked_rate_nonspecial"] = r.masked_rate_nonspecial;
  j["has_sidecar"] = r.has_sidecar;
  if (r.has_sidecar) {
    j["action_mask"] = r.action_mask;
    j["action_random"] = r.action_random;
    j["action_keep"] = r.action_keep;
    j["mask_action_ratio"] = r.mask_action_ratio;
    j["random_action_ratio"] = r.random_action_ratio;
    j["keep_action_ratio"] = r.keep_action_ratio;
    j["atomicity_violations"] = r.atomicity_violations;
  }
  j["unk_tokens"] = r.unk_tokens;
  j["unk_rate"] = r.unk_rate;
  j["cjk_tokens"] = r.cjk_tokens;
  j["latin_tokens"] = r.latin_tokens;
  j["other_tokens"] = r.other_tokens;
  j["nsp_positive"] = r.nsp_positive;
  j["nsp_positive_rate"] = r.nsp_positive_rate;
  j["vocab_fingerprint_matches"] = r.vocab_fingerprint_matches;
  return j.dump(2);
}

}  // namespace wwm::stats
