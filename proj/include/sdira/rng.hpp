#pragma once

#include <cstdint>

namespace sdira {

/// SplitMix64, used for seeding and for deriving independent streams.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

 private:
  std::uint64_t state_;
};

/// xoshiro256** with an explicit stream split. The double conversion is
/// fixed here so results do not depend on the standard library.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) {
    SplitMix64 sm(seed);
    for (auto& w : s_) w = sm.next();
  }

  /// Independent generator for a named component; deterministic in (seed, stream).
  static Rng stream(std::uint64_t seed, std::uint64_t stream_id) {
    SplitMix64 sm(seed ^ (0xD1B54A32D192ED03ULL * (stream_id + 1)));
    return Rng(sm.next());
  }

  std::uint64_t next() {
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

  /// Uniform in [0, 1).
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  int bernoulli(double p_one) { return uniform() < p_one ? 1 : 0; }

  /// Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n) {
    const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
    std::uint64_t r = next();
    while (r >= limit) r = next();
    return r % n;
  }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
  std::uint64_t s_[4];
};

namespace streams {
inline constexpr std::uint64_t kSource = 1;
inline constexpr std::uint64_t kDevice = 2;
inline constexpr std::uint64_t kSecondSource = 3;
inline constexpr std::uint64_t kSearch = 4;
}  // namespace streams

}  // namespace sdira
