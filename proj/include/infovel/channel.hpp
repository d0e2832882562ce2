#pragma once

// Binary symmetric channel substrate.
//
// Reproducibility contract (version 1):
//   * generator: xoshiro256** 1.0, state seeded by four successive splitmix64
//     outputs from the tape seed;
//   * tape seed for (master_seed, trial_index, link_id):
//       mix64(mix64(master_seed ^ mix64(trial_index + 0x9e3779b97f4a7c15))
//             ^ mix64(link_id + 0xd1b54a32d192ed03))
//     where mix64 is the splitmix64 finalizer;
//   * flips are produced by geometric gap sampling: the gap before the next
//     flip is floor(log(U) / log1p(-p)) with U = (x >> 11 + 1) * 2^-53.
// Changing any of these changes every CSV produced by the tools.

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>

#include "infovel/core.hpp"

namespace infovel {

inline constexpr std::uint64_t kSeedContractVersion = 1;

constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

constexpr std::uint64_t derive_seed(std::uint64_t master_seed, std::uint64_t trial_index,
                                    std::uint64_t link_id) noexcept {
  const std::uint64_t trial = mix64(master_seed ^ mix64(trial_index + 0x9e3779b97f4a7c15ULL));
  return mix64(trial ^ mix64(link_id + 0xd1b54a32d192ed03ULL));
}

class Xoshiro256 {
 public:
  using result_type = std::uint64_t;

  explicit Xoshiro256(std::uint64_t seed) noexcept {
    std::uint64_t x = seed;
    for (auto& s : state_) {
      x += 0x9e3779b97f4a7c15ULL;
      s = mix64(x);
    }
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

  // Uniform in (0, 1].
  double uniform_open0() noexcept {
    return static_cast<double>(((*this)() >> 11) + 1) * 0x1.0p-53;
  }

 private:
  static constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept {
    return (x << k) | (x >> (64 - k));
  }
  std::array<std::uint64_t, 4> state_{};
};

// Crossover probability of a BSC; 0 <= p < 1/2.
class CrossoverProb {
 public:
  explicit CrossoverProb(double p) : p_(p) {
    require(std::isfinite(p) && p >= 0.0 && p < 0.5,
            "crossover probability must satisfy 0 <= p < 1/2, got " + std::to_string(p));
    log_keep_ = std::log1p(-p);
  }

  double value() const noexcept { return p_; }
  // log(1 - p), cached for gap sampling.
  double log_keep() const noexcept { return log_keep_; }
  double delta() const noexcept { return 1.0 - 2.0 * p_; }

 private:
  double p_;
  double log_keep_;
};

constexpr std::uint8_t transmit(std::uint8_t bit, std::uint8_t flip) noexcept {
  return static_cast<std::uint8_t>(bit ^ flip);
}

// Reproducible Bernoulli(p) flip stream for one hop. Hop j connects node j to j + 1.
class NoiseTape {
 public:
  NoiseTape(std::uint64_t seed, std::uint64_t link_id, CrossoverProb p)
      : link_id_(link_id), seed_(seed), p_(p), rng_(seed) {
    draw_gap();
  }

  static NoiseTape for_trial(std::uint64_t master_seed, std::uint64_t trial_index,
                             std::uint64_t link_id, CrossoverProb p) {
    return NoiseTape(derive_seed(master_seed, trial_index, link_id), link_id, p);
  }

  std::uint8_t next_flip() noexcept {
    if (gap_ > 0) {
      --gap_;
      return 0;
    }
    draw_gap();
    return 1;
  }

  std::uint64_t link_id() const noexcept { return link_id_; }
  std::uint64_t seed() const noexcept { return seed_; }

 private:
  void draw_gap() noexcept {
    if (p_.value() == 0.0) {
      gap_ = std::numeric_limits<std::uint64_t>::max();
      return;
    }
    const double g = std::floor(std::log(rng_.uniform_open0()) / p_.log_keep());
    gap_ = g >= 1.8e19 ? std::numeric_limits<std::uint64_t>::max() : static_cast<std::uint64_t>(g);
  }

  std::uint64_t link_id_;
  std::uint64_t seed_;
  CrossoverProb p_;
  Xoshiro256 rng_;
  std::uint64_t gap_ = 0;
};

inline std::uint8_t next_flip(NoiseTape& tape) noexcept { return tape.next_flip(); }

}  // namespace infovel
