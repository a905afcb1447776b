#pragma once

#include <cstdint>

namespace ergocap {

/// Deterministic splitmix64 stream. Streams are keyed by mixing the seed
/// with component indices, so batches keyed by (seed, measure, path) are
/// independent of evaluation order.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  static Rng keyed(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0) {
    Rng r(seed);
    r.state_ = mix(mix(seed ^ 0x9e3779b97f4a7c15ull, a), b);
    return r;
  }

  std::uint64_t next() {
    state_ += 0x9e3779b97f4a7c15ull;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  /// Unbiased draw in [0, n) via 128-bit multiply rejection.
  std::uint64_t below(std::uint64_t n) {
    if (n == 0) return 0;
    while (true) {
      std::uint64_t x = next();
      __uint128_t m = static_cast<__uint128_t>(x) * n;
      std::uint64_t lo = static_cast<std::uint64_t>(m);
      if (lo < n) {
        std::uint64_t threshold = (0ull - n) % n;
        if (lo < threshold) continue;
      }
      return static_cast<std::uint64_t>(m >> 64);
    }
  }

 private:
  static std::uint64_t mix(std::uint64_t h, std::uint64_t v) {
    h ^= v + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
    h *= 0xff51afd7ed558ccdull;
    h ^= h >> 33;
    return h;
  }
  std::uint64_t state_;
};

}  // namespace ergocap
