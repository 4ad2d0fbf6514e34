#pragma once

#include <cstdint>
#include <random>
#include <span>

namespace roundcover {

// Thin wrapper over mt19937_64 with distribution code written out here, so
// seeded streams do not depend on the standard library's distribution
// implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }
  // Uniform on [0, 1) with 53 random bits.
  double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  // Uniform on {0, ..., n-1}, unbiased.
  std::uint64_t uniform_index(std::uint64_t n);
  bool bernoulli(double p) { return uniform01() < p; }
  // Index drawn proportionally to `weights` (non-negative, positive sum).
  std::size_t weighted_index(std::span<const double> weights);

 private:
  std::mt19937_64 engine_;
};

std::uint64_t splitmix64(std::uint64_t x);

// Per-trial stream: master_seed XOR trial_index.
inline std::uint64_t trial_seed(std::uint64_t master_seed, std::uint64_t trial_index) {
  return master_seed ^ trial_index;
}

}  // namespace roundcover
