#pragma once

#include <cmath>
#include <cstdint>

namespace nashbnb {

// SplitMix64 (Steele, Lea, Flood 2014). Chosen because the whole sequence is
// pinned down by the seed and the update below, so generated instances are
// reproducible across platforms and implementations.
class SplitMix64 {
 public:
  explicit SplitMix64(uint64_t seed) : state_(seed) {}

  uint64_t next() {
    uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  // Uniform double in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  // Uniform integer in [0, n).
  uint64_t below(uint64_t n) { return next() % n; }

  // Exponential(1) variate; used for Dirichlet sampling.
  double exponential() {
    double u = uniform();
    return -std::log1p(-u);
  }

 private:
  uint64_t state_;
};

// Derives the per-player stream seed: player i draws from a fresh SplitMix64
// seeded with the i-th output of a root generator. Keeping one stream per
// player makes tensors of different players independent of each other's
// action counts.
inline uint64_t player_stream_seed(uint64_t seed, int player) {
  SplitMix64 root(seed);
  uint64_t s = 0;
  for (int i = 0; i <= player; ++i) s = root.next();
  return s;
}

}  // namespace nashbnb
