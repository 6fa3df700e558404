// Copyright 2026 The Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef COMMITKIT_RNG_H_
#define COMMITKIT_RNG_H_

#include <cstdint>
#include <string_view>

namespace commitkit {

// Deterministic 64-bit generator (SplitMix64) used everywhere randomness is
// needed. We avoid <random> distributions on purpose: their outputs are
// implementation-defined, and corpus files must be byte-identical across
// platforms and standard libraries.
//
// Stream splitting: every sampled field of a generated instance draws from
// its own child generator obtained via fork(label[, index]). A fork is keyed
// by the parent's *seed* (not its current state), so the layout of draws in
// one stream can change without disturbing any other stream.
class Rng {
 public:
  explicit Rng(uint64_t seed) : seed_(seed), state_(seed) {}

  // Next raw 64-bit value (SplitMix64 step).
  uint64_t next() {
    uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform double in [0, 1), 53 mantissa bits.
  double next_double() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  // Uniform double in [lo, hi).
  double next_double(double lo, double hi) { return lo + (hi - lo) * next_double(); }

  // Unbiased uniform integer in [0, n); n > 0. Rejection sampling.
  uint64_t next_below(uint64_t n) {
    const uint64_t threshold = (0 - n) % n;  // 2^64 mod n
    for (;;) {
      const uint64_t x = next();
      if (x >= threshold) return x % n;
    }
  }

  int next_int(int n) { return static_cast<int>(next_below(static_cast<uint64_t>(n))); }

  // Child stream keyed by (seed, label) resp. (seed, label, index).
  Rng fork(std::string_view label) const { return Rng(mix(seed_ ^ hash(label))); }
  Rng fork(std::string_view label, uint64_t index) const {
    return Rng(mix(mix(seed_ ^ hash(label)) ^ index));
  }

  uint64_t seed() const { return seed_; }

  // FNV-1a over bytes; used for stream labels and for content fingerprints.
  static uint64_t hash(std::string_view bytes) {
    uint64_t h = 14695981039346656037ULL;
    for (const char c : bytes) {
      h ^= static_cast<unsigned char>(c);
      h *= 1099511628211ULL;
    }
    return h;
  }

 private:
  // One SplitMix64 scramble; decorrelates fork seeds from raw xors.
  static uint64_t mix(uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  uint64_t seed_;
  uint64_t state_;
};

}  // namespace commitkit

#endif  // COMMITKIT_RNG_H_
