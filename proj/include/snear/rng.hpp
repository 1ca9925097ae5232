// Copyright 2026 The snear Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef SNEAR_RNG_HPP
#define SNEAR_RNG_HPP

#include <cstdint>
#include <limits>
#include <random>

namespace snear {

/// What a substream is used for. Distinct purposes never share draws, which is
/// how communication noise is kept independent of gradient noise.
enum class Purpose : std::uint32_t {
  comm = 1,
  grad = 2,
  init = 3,
  graph = 4,
  objective = 5,
  shuffle = 6,
  estimate = 7,
  test = 99,
};

struct StreamKey {
  Purpose purpose = Purpose::test;
  std::uint64_t node = 0;
  std::uint64_t iteration = 0;
  std::uint64_t round = 0;
};

inline constexpr std::uint64_t splitmix64(std::uint64_t z) noexcept {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

inline constexpr std::uint64_t mix_key(std::uint64_t master,
                                       const StreamKey& key) noexcept {
  std::uint64_t h = splitmix64(master);
  h = splitmix64(h ^ static_cast<std::uint64_t>(key.purpose));
  h = splitmix64(h ^ key.node);
  h = splitmix64(h ^ key.iteration);
  h = splitmix64(h ^ key.round);
  return h;
}

/// Counter-based generator: draw i of a stream is a pure function of
/// (master seed, key, i). Satisfies UniformRandomBitGenerator so it plugs into
/// the <random> distributions.
class RngStream {
 public:
  using result_type = std::uint64_t;

  RngStream(std::uint64_t master_seed, const StreamKey& key) noexcept
      : base_(mix_key(master_seed, key)) {}

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept {
    return std::numeric_limits<result_type>::max();
  }

  result_type operator()() noexcept {
    return splitmix64(base_ + 0xD1B54A32D192ED03ULL * ++counter_);
  }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() noexcept {
    return static_cast<double>((*this)() >> 11) * 0x1.0p-53;
  }

  double normal() { return normal_(*this); }

  std::uint64_t below(std::uint64_t bound) {
    std::uniform_int_distribution<std::uint64_t> dist(0, bound - 1);
    return dist(*this);
  }

  std::uint64_t draws() const noexcept { return counter_; }

 private:
  std::uint64_t base_;
  std::uint64_t counter_ = 0;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

/// Derives a fresh 64-bit seed, e.g. for graph redraws.
inline std::uint64_t derive_seed(std::uint64_t master, Purpose purpose,
                                 std::uint64_t a, std::uint64_t b = 0) noexcept {
  return mix_key(master, StreamKey{purpose, a, b, 0});
}

}  // namespace snear

#endif  // SNEAR_RNG_HPP
