#pragma once

#include <cmath>
#include <cstdint>

namespace semisparse {

/// Counter-based generator: value i of stream `seed` is splitmix64(seed + i).
/// Pinned by the file formats and test fixtures, so the algorithm must not
/// change. splitmix64 reference: Steele, Lea, Flood, "Fast Splittable
/// Pseudorandom Number Generators", OOPSLA 2014 finalizer constants.
inline uint64_t splitmix64_at(uint64_t seed, uint64_t counter) {
  uint64_t z = seed + counter * 0x9E3779B97F4A7C15ull + 0x9E3779B97F4A7C15ull;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

/// Deterministic stream of uniforms and Gaussians. Gaussians come from the
/// Box-Muller transform, two per pair of uniforms, cached between calls.
class CounterRng {
 public:
  explicit CounterRng(uint64_t seed) : seed_(seed) {}

  uint64_t next_u64() { return splitmix64_at(seed_, counter_++); }

  /// Uniform in [0, 1), 53-bit mantissa resolution.
  double uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  /// Standard normal via Box-Muller on (u1, u2], guarding log(0).
  double gaussian() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = 1.0 - uniform();  // (0, 1]
    double u2 = uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    double a = 6.283185307179586476925286766559 * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

 private:
  uint64_t seed_;
  uint64_t counter_ = 0;
  bool have_spare_ = false;
  double spare_ = 0;
};

}  // namespace semisparse
