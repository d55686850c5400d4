#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace pathheat {

constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Counter-based stream: every variate is a pure function of
// (seed, path_index, step, slot), so results are independent of evaluation
// order and thread scheduling.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed) : seed_(splitmix64(seed ^ kDomain)) {}

  std::uint64_t seed() const { return seed_; }

  double uniform(std::uint64_t path, std::uint64_t step,
                 std::uint64_t slot = 0) const {
    std::uint64_t h = splitmix64(seed_ ^ splitmix64(path));
    h = splitmix64(h ^ splitmix64(step));
    h = splitmix64(h ^ slot);
    return (static_cast<double>(h >> 11) + 0.5) * 0x1.0p-53;
  }

  double normal(std::uint64_t path, std::uint64_t step) const {
    const double u1 = uniform(path, step, 0);
    const double u2 = uniform(path, step, 1);
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * std::numbers::pi * u2);
  }

 private:
  static constexpr std::uint64_t kDomain = 0xC2B2AE3D27D4EB4FULL;
  std::uint64_t seed_;
};

}  // namespace pathheat
