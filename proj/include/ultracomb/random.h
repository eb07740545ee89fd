#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>

namespace ultracomb {

// Counter-based stream: the n-th output is a SplitMix64 finalisation of
// key + n * golden, so a stream is fully determined by its seed and any
// replicate can be regenerated without replaying the others.
class Random_source {
 public:
  using result_type = std::uint64_t;

  explicit Random_source(std::uint64_t seed) : key_{mix(seed)} {}

  // Stream for replicate `index` of an experiment seeded with `seed`.
  static auto for_replicate(std::uint64_t seed, std::uint64_t index) -> Random_source {
    return Random_source{mix(seed) ^ index};
  }

  static constexpr auto min() -> result_type { return 0; }
  static constexpr auto max() -> result_type { return std::numeric_limits<result_type>::max(); }

  auto operator()() -> result_type { return mix(key_ + k_golden * ++counter_); }

  auto counter() const -> std::uint64_t { return counter_; }

  // Uniform on the open interval (0,1).
  auto uniform() -> double { return (static_cast<double>((*this)() >> 11) + 0.5) * 0x1.0p-53; }

  auto uniform(double lo, double hi) -> double { return lo + (hi - lo) * uniform(); }

  auto exponential(double rate) -> double { return -std::log(uniform()) / rate; }

  auto poisson(double mean) -> std::uint64_t {
    if (mean <= 0.0) return 0;
    return std::poisson_distribution<std::uint64_t>{mean}(*this);
  }

  auto gamma(double shape, double scale) -> double {
    return std::gamma_distribution<double>{shape, scale}(*this);
  }

  // Beta(1, theta) by inversion of its survival function (1-z)^theta.
  auto beta_one(double theta) -> double { return -std::expm1(std::log(uniform()) / theta); }

 private:
  static constexpr std::uint64_t k_golden = 0x9e3779b97f4a7c15ULL;

  static constexpr auto mix(std::uint64_t z) -> std::uint64_t {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace ultracomb
