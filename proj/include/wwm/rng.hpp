// Copyright 2026 the wwm-pipeline authors.
// SPDX-License-Identifier: Apache-2.0
//
// Deterministic random number generation. Output bytes of the pipeline are
// part of its contract, so everything here is pinned: xoshiro256** seeded
// through splitmix64, Lemire's debiased bounded draw, and Fisher-Yates
// shuffling. Do not swap in std::shuffle or std::uniform_*_distribution --
// their sequences are implementation-defined and would silently change the
// emitted records.
//
// Independent streams are derived by folding (seed, index...) tuples
// through splitmix64, e.g. one stream per (document, dupe) for packing and
// one per (document, dupe, sequence) for masking; this is what makes the
// output independent of worker scheduling.

#pragma once

#include <cstdint>
#include <initializer_list>
#include <vector>

namespace wwm::rng {

// splitmix64 finalizer (Vigna). Good avalanche; used for seeding and for
// deriving per-task streams.
inline constexpr uint64_t mix64(uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Folds a tuple of indices into a single stream seed.
inline constexpr uint64_t derive_stream(uint64_t seed,
                                        std::initializer_list<uint64_t> parts) {
  uint64_t h = mix64(seed);
  for (uint64_t p : parts) {
    h = mix64(h ^ (p + 0x9E3779B97F4A7C15ULL));
  }
  return h;
}

// xoshiro256** 1.0 (Blackman & Vigna, public domain reference algorithm).
class Rng {
 public:
  explicit Rng(uint64_t seed) {
    uint64_t x = seed;
    for (auto& word : state_) {
      x = mix64(x);
      word = x;
    }
  }

  uint64_t next_u64() {
    const uint64_t result = rotl(state_[1] * 5, 7) * 9;
    const uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  // Uniform double in [0, 1) with 53 random bits.
  double next_double() {
    return double(next_u64() >> 11) * 0x1.0p-53;
  }

  // Uniform integer in [0, n), n > 0. Lemire's multiply-shift with the
  // standard rejection step to remove modulo bias.
  uint32_t next_below(uint32_t n) {
    uint32_t x = uint32_t(next_u64() >> 32);
    uint64_t m = uint64_t(x) * uint64_t(n);
    uint32_t low = uint32_t(m);
    if (low < n) {
      uint32_t threshold = uint32_t(-n) % n;
      while (low < threshold) {
        x = uint32_t(next_u64() >> 32);
        m = uint64_t(x) * uint64_t(n);
        low = uint32_t(m);
      }
    }
    return uint32_t(m >> 32);
  }

  // In-place Fisher-Yates shuffle.
  template <typename T>
  void shuffle(std::vector<T>& values) {
    for (size_t i = values.size(); i > 1; --i) {
      size_t j = next_below(uint32_t(i));
      std::swap(values[i - 1], values[j]);
    }
  }

 private:
  static constexpr uint64_t rotl(uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }

  uint64_t state_[4];
};

}  // namespace wwm::rng
