#pragma once

// Deterministic seeding. Every stochastic routine takes an explicit 64-bit
// seed; the same seed reproduces the same stream bit-for-bit on one platform.
// Substreams for parallel workers are derived with SplitMix64 so that worker
// partitioning never changes the per-worker streams.

#include <cstdint>

namespace vinlab {

inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Independent substream seed for worker/trial k.
inline std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t k) {
  std::uint64_t s = seed ^ (0x517cc1b727220a95ULL * (k + 1));
  splitmix64(s);
  return splitmix64(s);
}

// xoshiro256** — small, fast, reproducible across compilers (no
// distribution objects with implementation-defined behavior).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) {
    std::uint64_t sm = seed;
    for (auto& w : s_) w = splitmix64(sm);
  }

  std::uint64_t next_u64() {
    const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  // Uniform in [0,1) with 53 random bits.
  double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform integer in [0, n).
  std::uint64_t next_below(std::uint64_t n) {
    // Lemire rejection-free-ish bounded draw; bias < 2^-64 is irrelevant here,
    // but keep the rejection loop so counts are exactly uniform.
    std::uint64_t threshold = (0 - n) % n;
    for (;;) {
      std::uint64_t r = next_u64();
      if (r >= threshold) return r % n;
    }
  }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
  std::uint64_t s_[4];
};

}  // namespace vinlab
