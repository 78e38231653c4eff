// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>

namespace brw {

/// One step of the SplitMix64 sequence; advances `state`.
constexpr std::uint64_t splitmix64(std::uint64_t& state) noexcept {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

/// Order-sensitive 64-bit hash of two words. Used to derive stream keys.
constexpr std::uint64_t hash_combine(std::uint64_t a, std::uint64_t b) noexcept {
  std::uint64_t s = a ^ 0x6a09e667f3bcc909ull;
  std::uint64_t h = splitmix64(s);
  s = h ^ b;
  return splitmix64(s);
}

template <class... Words>
constexpr std::uint64_t stream_key(std::uint64_t seed, Words... words) noexcept {
  std::uint64_t key = seed;
  ((key = hash_combine(key, static_cast<std::uint64_t>(words))), ...);
  return key;
}

/*!
 * xoshiro256** generator seeded through SplitMix64.
 *
 * Every stochastic object in the toolkit draws from an `Rng` constructed from
 * a stream key, never from a shared global engine, so results depend only on
 * (seed, stream coordinates) and not on scheduling.
 */
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t key) noexcept {
    std::uint64_t s = key;
    for (auto& word : state_) word = splitmix64(s);
  }

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept {
    return std::numeric_limits<result_type>::max();
  }

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

  // Uniform on the open interval (0, 1).
  double uniform() noexcept {
    return (static_cast<double>((*this)() >> 11) + 0.5) * 0x1.0p-53;
  }

  double normal() { return normal_(*this); }
  double normal(double mean, double sd) { return mean + sd * normal_(*this); }

  std::uint64_t poisson(double mean) {
    std::poisson_distribution<std::uint64_t> dist(mean);
    return dist(*this);
  }

  // Uniform index in [0, n).
  std::uint64_t index(std::uint64_t n) {
    std::uniform_int_distribution<std::uint64_t> dist(0, n - 1);
    return dist(*this);
  }

 private:
  static constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept {
    return (x << k) | (x >> (64 - k));
  }

  std::uint64_t state_[4]{};
  std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace brw
