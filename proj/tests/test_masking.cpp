// Copyright 2026 the wwm-pipeline authors.
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <set>
#include <string>
#include <vector>

#include <doctest.h>

#include "wwm/masking.hpp"
#include "wwm/rng.hpp"
#include "wwm/segmenter.hpp"
#include "wwm/tokenizer.hpp"
#include "wwm/vocab.hpp"

using namespace wwm;

namespace {

tok::Vocab figure_vocab() {
  std::string text = "[PAD]\n[UNK]\n[CLS]\n[SEP]\n[MASK]\n";
  for (const char* t : {"使", "用", "语", "言", "模", "型", "来", "预", "测",
                        "下", "一", "个", "词", "的", "。", "pro", "##babi",
                        "##lity"}) {
    text += t;
    text += "\n";
  }
  return tok::Vocab::from_text(text);
}

const char* kSentence = "使用语言模型来预测下一个词的probability。";

tok::Piece piece(uint32_t begin, uint32_t end, bool cont = false) {
  tok::Piece p;
  p.text = "x";
  p.id = 0;
  p.begin = begin;
  p.end = end;
  p.is_continuation = cont;
  return p;
}

seg::Word word(uint32_t begin, uint32_t end) {
  seg::Word w;
  w.text = "w";
  w.begin = begin;
  w.end = end;
  return w;
}

std::vector<uint32_t> unit_sizes(const std::vector<mask::WordUnit>& units) {
  std::vector<uint32_t> sizes;
  for (const auto& u : units) sizes.push_back(u.size());
  return sizes;
}

}  // namespace

TEST_SUITE("masking") {

TEST_CASE("align produces the canonical word units for the figure sentence") {
  tok::Vocab v = figure_vocab();
  tok::Tokenizer t(v);
  seg::Lexicon l = seg::Lexicon::from_text("使用\n语言\n模型\n预测\n一个\n");

  auto words = seg::fmm_segment(kSentence, l);
  auto pieces = t.tokenize(kSentence);
  REQUIRE(pieces.size() == 18);
  auto aligned = mask::align(words, pieces);

  CHECK(aligned.mismatches == 0);
  CHECK(unit_sizes(aligned.units) ==
        std::vector<uint32_t>{2, 2, 2, 1, 2, 1, 2, 1, 1, 3, 1});
  // The multi-piece word "probability" is one unit spanning tokens 14..17.
  CHECK(aligned.units[9] == mask::WordUnit{14, 17});
}

TEST_CASE("align covers every token exactly once") {
  // Word spans [0,2) [2,5) [5,6); tokens tile them unevenly.
  std::vector<seg::Word> words = {word(0, 2), word(2, 5), word(5, 6)};
  tok::TokenSeq tokens = {piece(0, 1), piece(1, 2), piece(2, 4, true),
                          piece(4, 5), piece(5, 6)};
  auto r = mask::align(words, tokens);
  CHECK(r.mismatches == 0);
  CHECK(r.units == std::vector<mask::WordUnit>{{0, 2}, {2, 4}, {4, 5}});
}

TEST_CASE("align dissolves straddling tokens into singles") {
  // Token [1,3) straddles the word boundary at 2.
  std::vector<seg::Word> words = {word(0, 2), word(2, 4)};
  tok::TokenSeq tokens = {piece(0, 1), piece(1, 3), piece(3, 4)};
  auto r = mask::align(words, tokens);
  CHECK(r.mismatches == 1);
  CHECK(r.units == std::vector<mask::WordUnit>{{0, 1}, {1, 2}, {2, 3}});
}

TEST_CASE("align handles tokens past the last word defensively") {
  std::vector<seg::Word> words = {word(0, 1)};
  tok::TokenSeq tokens = {piece(0, 1), piece(1, 2)};
  auto r = mask::align(words, tokens);
  CHECK(r.mismatches == 1);
  CHECK(r.units == std::vector<mask::WordUnit>{{0, 1}, {1, 2}});
}

TEST_CASE("num_to_predict frozen values") {
  mask::MaskingConfig cfg;  // 0.15, cap 20
  CHECK(mask::round_half_away(1.5) == 2);
  CHECK(mask::round_half_away(19.2) == 19);
  CHECK(mask::round_half_away(0.45) == 0);
  CHECK(mask::num_to_predict(128, cfg) == 19);  // round(19.2), under cap 20
  CHECK(mask::num_to_predict(10, cfg) == 2);    // 1.5 rounds away from zero
  CHECK(mask::num_to_predict(3, cfg) == 1);     // floor of one prediction
  cfg.max_predictions_per_seq = 77;
  CHECK(mask::num_to_predict(512, cfg) == 77);  // round(76.8) == cap
  cfg.max_predictions_per_seq = 5;
  CHECK(mask::num_to_predict(128, cfg) == 5);   // capped
}

TEST_CASE("select_units takes whole units up to the budget") {
  // Ten single-token units, token_count 10 -> budget 2.
  std::vector<mask::WordUnit> units;
  for (uint32_t i = 0; i < 10; ++i) units.push_back({i, i + 1});
  mask::MaskingConfig cfg;
  for (uint64_t seed = 0; seed < 50; ++seed) {
    rng::Rng rng(seed);
    auto chosen = mask::select_units(units, 10, cfg, rng);
    REQUIRE(chosen.size() == 2);
    CHECK(chosen[0] != chosen[1]);
  }
}

TEST_CASE("select_units skips oversize units and continues") {
  // Sizes 2, 1, 3 with budget 3: the only reachable outcomes are
  // {unit0, unit1} and {unit2}, both saturating the budget.
  std::vector<mask::WordUnit> units = {{0, 2}, {2, 3}, {3, 6}};
  mask::MaskingConfig cfg;
  cfg.masked_lm_prob = 0.5;  // budget = round(6 * 0.5) = 3
  bool saw_pair = false, saw_big = false;
  for (uint64_t seed = 0; seed < 100; ++seed) {
    rng::Rng rng(seed);
    auto chosen = mask::select_units(units, 6, cfg, rng);
    uint32_t tokens = 0;
    for (const auto& u : chosen) tokens += u.size();
    CHECK(tokens == 3);
    std::set<mask::WordUnit, decltype([](const mask::WordUnit& a,
                                         const mask::WordUnit& b) {
      return a.begin < b.begin;
    })> as_set(chosen.begin(), chosen.end());
    if (as_set.count({3, 6})) {
      CHECK(chosen.size() == 1);
      saw_big = true;
    } else {
      CHECK(chosen.size() == 2);
      saw_pair = true;
    }
  }
  CHECK(saw_pair);
  CHECK(saw_big);
}

TEST_CASE("select_units never splits a unit even when budget is 1") {
  // One unit of size 3 and one of size 1; budget 1 forces the single.
  std::vector<mask::WordUnit> units = {{0, 3}, {3, 4}};
  mask::MaskingConfig cfg;  // token_count 4 -> round(0.6) = 1
  for (uint64_t seed = 0; seed < 30; ++seed) {
    rng::Rng rng(seed);
    auto chosen = mask::select_units(units, 4, cfg, rng);
    REQUIRE(chosen.size() == 1);
    CHECK(chosen[0] == mask::WordUnit{3, 4});
  }
}

TEST_CASE("apply_mask with mask_ratio 1 masks exactly the chosen units") {
  // The whole-word row of the figure: units 模型, 预测, probability.
  tok::Vocab v = figure_vocab();
  tok::Tokenizer t(v);
  auto pieces = t.tokenize(kSentence);
  std::vector<int32_t> ids, original;
  for (const auto& p : pieces) ids.push_back(p.id);
  original = ids;

  mask::MaskingConfig cfg;
  cfg.mask_ratio = 1.0;
  cfg.random_ratio = 0.0;
  cfg.keep_ratio = 0.0;
  std::vector<mask::WordUnit> chosen = {{4, 6}, {7, 9}, {14, 17}};
  rng::Rng rng(1);
  auto positions = mask::apply_mask(ids, chosen, cfg, v, rng);

  std::vector<uint32_t> expect = {4, 5, 7, 8, 14, 15, 16};
  REQUIRE(positions.size() == expect.size());
  for (size_t i = 0; i < expect.size(); ++i) {
    CHECK(positions[i].index == expect[i]);
    CHECK(positions[i].original_id == original[expect[i]]);
    CHECK(positions[i].action == mask::Action::kMask);
    CHECK(ids[expect[i]] == v.specials().mask);
  }
  // Everything outside the chosen units is untouched.
  for (size_t i = 0; i < ids.size(); ++i) {
    if (std::find(expect.begin(), expect.end(), i) == expect.end()) {
      CHECK(ids[i] == original[i]);
    }
  }
}

TEST_CASE("apply_mask action frequencies converge to 80/10/10") {
  std::string vt = "[PAD]\n[UNK]\n[CLS]\n[SEP]\n[MASK]\n";
  for (int i = 0; i < 995; ++i) vt += "tok" + std::to_string(i) + "\n";
  tok::Vocab v = tok::Vocab::from_text(vt);

  const size_t n = 100000;
  std::vector<int32_t> ids(n, 10);
  std::vector<mask::WordUnit> all;
  for (uint32_t i = 0; i < n; ++i) all.push_back({i, i + 1});

  mask::MaskingConfig cfg;
  rng::Rng rng(0xFACE);
  auto positions = mask::apply_mask(ids, all, cfg, v, rng);
  REQUIRE(positions.size() == n);

  size_t masks = 0, randoms = 0, keeps = 0;
  for (const auto& mp : positions) {
    CHECK(mp.original_id == 10);
    switch (mp.action) {
      case mask::Action::kMask:
        ++masks;
        CHECK(ids[mp.index] == v.specials().mask);
        break;
      case mask::Action::kRandom:
        ++randoms;
        CHECK_FALSE(v.is_special(ids[mp.index]));
        break;
      case mask::Action::kKeep:
        ++keeps;
        CHECK(ids[mp.index] == 10);
        break;
    }
  }
  CHECK(double(masks) / n == doctest::Approx(0.8).epsilon(0.0125));
  CHECK(double(randoms) / n == doctest::Approx(0.1).epsilon(0.1));
  CHECK(double(keeps) / n == doctest::Approx(0.1).epsilon(0.1));
}

TEST_CASE("atomicity: masked index set equals the union of chosen units") {
  rng::Rng meta(0xA70);
  std::string vt = "[PAD]\n[UNK]\n[CLS]\n[SEP]\n[MASK]\n";
  for (int i = 0; i < 50; ++i) vt += "t" + std::to_string(i) + "\n";
  tok::Vocab v = tok::Vocab::from_text(vt);

  for (int iter = 0; iter < 200; ++iter) {
    // Random unit partition of a random-length token vector.
    uint32_t len = 10 + meta.next_below(120);
    std::vector<mask::WordUnit> units;
    uint32_t at = 0;
    while (at < len) {
      uint32_t sz = 1 + meta.next_below(std::min(4u, len - at));
      units.push_back({at, at + sz});
      at += sz;
    }
    std::vector<int32_t> ids(len, 7);

    mask::MaskingConfig cfg;
    cfg.max_predictions_per_seq = 20;
    rng::Rng rng(meta.next_u64());
    auto chosen = mask::select_units(units, len, cfg, rng);
    auto positions = mask::apply_mask(ids, chosen, cfg, v, rng);

    std::set<uint32_t> expect;
    for (const auto& u : chosen) {
      for (uint32_t p = u.begin; p < u.end; ++p) expect.insert(p);
    }
    std::set<uint32_t> got;
    for (const auto& mp : positions) got.insert(mp.index);
    CHECK(got == expect);
    CHECK(positions.size() == expect.size());  // no duplicates
    CHECK(std::is_sorted(positions.begin(), positions.end(),
                         [](const mask::MaskedPosition& a,
                            const mask::MaskedPosition& b) {
                           return a.index < b.index;
                         }));
    CHECK(positions.size() <= mask::num_to_predict(len, cfg));
  }
}

TEST_CASE("apply_mask is deterministic for a fixed seed") {
  tok::Vocab v = figure_vocab();
  std::vector<mask::WordUnit> chosen = {{0, 2}, {5, 6}};
  mask::MaskingConfig cfg;

  std::vector<int32_t> first_ids;
  std::vector<uint32_t> first_pos;
  for (int rep = 0; rep < 3; ++rep) {
    std::vector<int32_t> ids = {5, 6, 7, 8, 9, 10};
    rng::Rng rng(42);
    auto positions = mask::apply_mask(ids, chosen, cfg, v, rng);
    std::vector<uint32_t> pos_only;
    for (const auto& mp : positions) pos_only.push_back(mp.index);
    if (rep == 0) {
      first_ids = ids;
      first_pos = pos_only;
    } else {
      CHECK(ids == first_ids);
      CHECK(pos_only == first_pos);
    }
  }
}

}  // TEST_SUITE
