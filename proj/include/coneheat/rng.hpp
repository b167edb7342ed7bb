#pragma once

#include <cstdint>
#include <random>

namespace coneheat {

// Deterministic RNG. mt19937_64 output is fully specified by the standard; the
// [0,1) mapping below takes the top 53 bits, so sequences are identical across
// platforms (std::uniform_real_distribution would not guarantee that).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  std::uint64_t next_u64() { return eng_(); }

  // uniform in [0,1), 53-bit resolution
  double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // uniform integer in [0, n)
  std::uint64_t below(std::uint64_t n) { return eng_() % n; }

 private:
  std::mt19937_64 eng_;
};

}  // namespace coneheat
