#pragma once

// Pinned pseudo-random stream shared by the generators and the search engine.
//
// Seeding: the 64-bit seed is expanded with SplitMix64
//     z  = (x += 0x9e3779b97f4a7c15)
//     z  = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9
//     z  = (z ^ (z >> 27)) * 0x94d049bb133111eb
//     out = z ^ (z >> 31)
// into the four words s0..s3 of xoshiro256**, whose update is
//     result = rotl(s1 * 5, 7) * 9
//     t = s1 << 17
//     s2 ^= s0; s3 ^= s1; s1 ^= s2; s0 ^= s3; s2 ^= t; s3 = rotl(s3, 45)
//
// Derived draws:
//     uniform_below(k): reject x < (2^64 - k) mod k, return x mod k
//     bernoulli(p):     (x >> 11) * 2^-53 < p
//     unit():           (x >> 11) * 2^-53
// Any reimplementation of these formulas reproduces every instance and every
// search run bit for bit.

#include <array>
#include <cstdint>
#include <limits>
#include <utility>
#include <vector>

namespace smls {

inline std::uint64_t splitmix64(std::uint64_t& x) {
  std::uint64_t z = (x += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t seed = 0) { reseed(seed); }

  void reseed(std::uint64_t seed) {
    std::uint64_t x = seed;
    for (auto& word : s_) word = splitmix64(x);
  }

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() { return next(); }

  result_type next() {
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

  /// Uniform integer in [0, bound). bound must be positive.
  std::uint64_t uniform_below(std::uint64_t bound) {
    const std::uint64_t threshold = (0 - bound) % bound;
    for (;;) {
      const std::uint64_t x = next();
      if (x >= threshold) return x % bound;
    }
  }

  double unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  bool bernoulli(double p) { return unit() < p; }

  /// Fisher-Yates from the back: for i = size-1 down to 1, swap(v[i], v[uniform_below(i+1)]).
  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      const auto j = static_cast<std::size_t>(uniform_below(i));
      std::swap(v[i - 1], v[j]);
    }
  }

  const std::array<std::uint64_t, 4>& state() const { return s_; }

  friend bool operator==(const Rng&, const Rng&) = default;

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

  std::array<std::uint64_t, 4> s_{};
};

}  // namespace smls
