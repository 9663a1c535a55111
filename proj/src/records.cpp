// Copyright 2026 the wwm-pipeline authors.
// SPDX-License-Identifier: Apache-2.0

#include "wwm/records.hpp"

#include <cstring>

#include <json.hpp>

#include "wwm/error.hpp"

namespace wwm::rec {
namespace {

using ordered_json = nlohmann::ordered_json;

constexpr char kMagic[4] = {'W', 'W', 'M', 'R'};

void put_u32(std::string& buf, uint32_t v) {
  buf.push_back(char(v & 0xFF));
  buf.push_back(char((v >> 8) & 0xFF));
  buf.push_back(char((v >> 16) & 0xFF));
  buf.push_back(char((v >> 24) & 0xFF));
}

void put_u64(std::string& buf, uint64_t v) {
  put_u32(buf, uint32_t(v));
  put_u32(buf, uint32_t(v >> 32));
}

void put_f32(std::string& buf, float f) {
  uint32_t v;
  std::memcpy(&v, &f, 4);
  put_u32(buf, v);
}

uint32_t get_u32(const char* p) {
  auto b = [&](int i) { return uint32_t(uint8_t(p[i])); };
  return b(0) | (b(1) << 8) | (b(2) << 16) | (b(3) << 24);
}

uint64_t get_u64(const char* p) {
  return uint64_t(get_u32(p)) | (uint64_t(get_u32(p + 4)) << 32);
}

float get_f32(const char* p) {
  uint32_t v = get_u32(p);
  float f;
  std::memcpy(&f, &v, 4);
  return f;
}

size_t payload_size(const RecordHeader& h) {
  return 12 * size_t(h.max_seq_len) + 12 * size_t(h.max_predictions_per_seq) + 1;
}

}  // namespace

bool parse_format(std::string_view name, Format& format) {
  if (name == "jsonl") {
    format = Format::kJsonl;
  } else if (name == "binary") {
    format = Format::kBinary;
  } else {
    return false;
  }
  return true;
}

const char* format_name(Format format) {
  return format == Format::kJsonl ? "jsonl" : "binary";
}

std::string fingerprint_hex(uint64_t fp) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", (unsigned long long)fp);
  return buf;
}

bool parse_fingerprint(const std::string& hex, uint64_t& fp) {
  if (hex.size() != 16) return false;
  fp = 0;
  for (char c : hex) {
    uint64_t nibble;
    if (c >= '0' && c <= '9') {
      nibble = uint64_t(c - '0');
    } else if (c >= 'a' && c <= 'f') {
      nibble = uint64_t(c - 'a') + 10;
    } else {
      return false;
    }
    fp = (fp << 4) | nibble;
  }
  return true;
}

RecordWriter::RecordWriter(const std::string& path, Format format,
                           const RecordHeader& header)
    : out_(path, std::ios::binary | std::ios::trunc),
      path_(path),
      format_(format),
      header_(header) {
  if (!out_) throw_io("records: cannot open '" + path + "' for writing");
  if (format_ == Format::kJsonl) {
    ordered_json h;
    h["format_version"] = header_.format_version;
    h["max_seq_len"] = header_.max_seq_len;
    h["max_predictions_per_seq"] = header_.max_predictions_per_seq;
    h["vocab_fingerprint"] = fingerprint_hex(header_.vocab_fingerprint);
    ordered_json line;
    line["__header__"] = std::move(h);
    out_ << line.dump() << '\n';
  } else {
    std::string buf;
    buf.append(kMagic, 4);
    put_u32(buf, header_.format_version);
    put_u32(buf, header_.max_seq_len);
    put_u32(buf, header_.max_predictions_per_seq);
    put_u64(buf, header_.vocab_fingerprint);
    out_.write(buf.data(), std::streamsize(buf.size()));
  }
  if (!out_) throw_io("records: write failure on '" + path_ + "'");
}

RecordWriter::~RecordWriter() {
  try {
    finish();
  } catch (...) {
    // Destructors must not throw; explicit finish() reports errors.
  }
}

void RecordWriter::write(const build::TrainingInstance& inst) {
  const size_t L = header_.max_seq_len;
  const size_t P = header_.max_predictions_per_seq;
  if (inst.input_ids.size() != L || inst.input_mask.size() != L ||
      inst.segment_ids.size() != L || inst.masked_lm_positions.size() != P ||
      inst.masked_lm_ids.size() != P || inst.masked_lm_weights.size() != P) {
    throw_data("records: instance dimensions do not match header (record " +
               std::to_string(count_) + ")");
  }

  if (format_ == Format::kJsonl) {
    ordered_json j;
    j["input_ids"] = inst.input_ids;
    j["input_mask"] = inst.input_mask;
    j["segment_ids"] = inst.segment_ids;
    j["masked_lm_positions"] = inst.masked_lm_positions;
    j["masked_lm_ids"] = inst.masked_lm_ids;
    j["masked_lm_weights"] = inst.masked_lm_weights;
    j["next_sentence_label"] = inst.next_sentence_label;
    out_ << j.dump() << '\n';
  } else {
    std::string buf;
    buf.reserve(4 + payload_size(header_));
    put_u32(buf, uint32_t(payload_size(header_)));
    for (int32_t v : inst.input_ids) put_u32(buf, uint32_t(v));
    for (int32_t v : inst.input_mask) put_u32(buf, uint32_t(v));
    for (int32_t v : inst.segment_ids) put_u32(buf, uint32_t(v));
    for (int32_t v : inst.masked_lm_positions) put_u32(buf, uint32_t(v));
    for (int32_t v : inst.masked_lm_ids) put_u32(buf, uint32_t(v));
    for (float v : inst.masked_lm_weights) put_f32(buf, v);
    buf.push_back(char(inst.next_sentence_label));
    out_.write(buf.data(), std::streamsize(buf.size()));
  }
  if (!out_) throw_io("records: write failure on '" + path_ + "'");
  ++count_;
}

void RecordWriter::finish() {
  if (finished_) return;
  finished_ = true;
  out_.flush();
  if (!out_) throw_io("records: flush failure on '" + path_ + "'");
  out_.close();
}

RecordReader::RecordReader(const std::string& path)
    : in_(path, std::ios::binary), path_(path) {
  if (!in_) throw_io("records: cannot open '" + path + "'");

  char magic[4] = {};
  in_.read(magic, 4);
  if (in_.gcount() == 4 && std::memcmp(magic, kMagic, 4) == 0) {
    format_ = Format::kBinary;
    char buf[20];
    in_.read(buf, 20);
    if (in_.gcount() != 20) throw_data("records: truncated binary header");
    header_.format_version = get_u32(buf);
    header_.max_seq_len = get_u32(buf + 4);
    header_.max_predictions_per_seq = get_u32(buf + 8);
    header_.vocab_fingerprint = get_u64(buf + 12);
  } else {
    format_ = Format::kJsonl;
    in_.clear();
    in_.seekg(0);
    std::string line;
    if (!std::getline(in_, line)) throw_data("records: empty jsonl file");
    ordered_json j;
    try {
      j = ordered_json::parse(line);
    } catch (const std::exception& e) {
      throw_data(std::string("records: bad jsonl header: ") + e.what());
    }
    if (!j.is_object() || !j.contains("__header__")) {
      throw_data("records: first jsonl object must be a __header__");
    }
    const auto& h = j["__header__"];
    try {
      header_.format_version = h.at("format_version").get<uint32_t>();
      header_.max_seq_len = h.at("max_seq_len").get<uint32_t>();
      header_.max_predictions_per_seq =
          h.at("max_predictions_per_seq").get<uint32_t>();
      std::string fp = h.at("vocab_fingerprint").get<std::string>();
      if (!parse_fingerprint(fp, header_.vocab_fingerprint)) {
        throw_data("records: malformed vocab_fingerprint '" + fp + "'");
      }
    } catch (const Error&) {
      throw;
    } catch (const std::exception& e) {
      throw_data(std::string("records: bad jsonl header: ") + e.what());
    }
  }
  if (header_.format_version != 1) {
    throw_data("records: unsupported format_version " +
               std::to_string(header_.format_version));
  }
}

bool RecordReader::next(build::TrainingInstance& out) {
  const size_t L = header_.max_seq_len;
  const size_t P = header_.max_predictions_per_seq;

  if (format_ == Format::kJsonl) {
    std::string line;
    if (!std::getline(in_, line)) {
      if (in_.bad()) throw_io("records: read failure on '" + path_ + "'");
      return false;
    }
    ordered_json j;
    try {
      j = ordered_json::parse(line);
      out.input_ids = j.at("input_ids").get<std::vector<int32_t>>();
      out.input_mask = j.at("input_mask").get<std::vector<int32_t>>();
      out.segment_ids = j.at("segment_ids").get<std::vector<int32_t>>();
      out.masked_lm_positions =
          j.at("masked_lm_positions").get<std::vector<int32_t>>();
      out.masked_lm_ids = j.at("masked_lm_ids").get<std::vector<int32_t>>();
      out.masked_lm_weights =
          j.at("masked_lm_weights").get<std::vector<float>>();
      out.next_sentence_label = j.at("next_sentence_label").get<int32_t>();
    } catch (const std::exception& e) {
      throw_data("records: record " + std::to_string(index_) +
                 " is malformed: " + e.what());
    }
    if (out.input_ids.size() != L || out.input_mask.size() != L ||
        out.segment_ids.size() != L || out.masked_lm_positions.size() != P ||
        out.masked_lm_ids.size() != P || out.masked_lm_weights.size() != P) {
      throw_data("records: record " + std::to_string(index_) +
                 " dimensions do not match header");
    }
    ++index_;
    return true;
  }

  char len_buf[4];
  in_.read(len_buf, 4);
  if (in_.gcount() == 0 && in_.eof()) return false;
  if (in_.gcount() != 4) {
    throw_data("records: record " + std::to_string(index_) + " truncated");
  }
  uint32_t len = get_u32(len_buf);
  if (len != payload_size(header_)) {
    throw_data("records: record " + std::to_string(index_) +
               " has unexpected length " + std::to_string(len));
  }
  std::string payload(len, '\0');
  in_.read(payload.data(), std::streamsize(len));
  if (uint32_t(in_.gcount()) != len) {
    throw_data("records: record " + std::to_string(index_) + " truncated");
  }

  const char* p = payload.data();
  auto read_i32s = [&](std::vector<int32_t>& v, size_t count) {
    v.resize(count);
    for (size_t i = 0; i < count; ++i, p += 4) v[i] = int32_t(get_u32(p));
  };
  read_i32s(out.input_ids, L);
  read_i32s(out.input_mask, L);
  read_i32s(out.segment_ids, L);
  read_i32s(out.masked_lm_positions, P);
  read_i32s(out.masked_lm_ids, P);
  out.masked_lm_weights.resize(P);
  for (size_t i = 0; i < P; ++i, p += 4) out.masked_lm_weights[i] = get_f32(p);
  out.next_sentence_label = int32_t(uint8_t(*p));
  ++index_;
  return true;
}

}  // namespace wwm::rec
