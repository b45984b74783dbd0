#pragma once

#include <cstdint>
#include <limits>
#include <string_view>

namespace coboson {

// SplitMix64 (Steele, Lea, Flood 2014; constants as published by Vigna).
class SplitMix64 {
 public:
  explicit constexpr SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}

  constexpr std::uint64_t next() noexcept {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

 private:
  std::uint64_t state_;
};

/// xoshiro256** 1.0 (Blackman & Vigna). The 256-bit state is filled from
/// SplitMix64 keyed on (seed, stream), which gives each stream an independent
/// starting point. Satisfies UniformRandomBitGenerator.
class Xoshiro256StarStar {
 public:
  using result_type = std::uint64_t;
  static constexpr std::string_view name = "xoshiro256**/splitmix64";

  explicit Xoshiro256StarStar(std::uint64_t seed, std::uint64_t stream = 0) noexcept {
    SplitMix64 outer(seed);
    const std::uint64_t key = outer.next() ^ SplitMix64(stream ^ 0xD1B54A32D192ED03ull).next();
    SplitMix64 mixer(key);
    for (auto& word : state_) word = mixer.next();
  }

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

  result_type operator()() noexcept {
    const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  // Uniform double in [0, 1) from the top 53 bits.
  double uniform() noexcept { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

 private:
  static constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept {
    return (x << k) | (x >> (64 - k));
  }

  std::uint64_t state_[4];
};

}  // namespace coboson
