#pragma once

#include <cstdint>
#include <random>

namespace entangle {

// Seeded generator. The engine is std::mt19937_64 (fully specified by the
// standard); the distributions are implemented here because the std::
// distribution algorithms are implementation-defined, and event streams must
// be bit-identical across toolchains.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  bool bernoulli(double p) { return uniform() < p; }

  std::uint8_t bit() { return static_cast<std::uint8_t>(engine_() >> 63); }

  // Uniform integer on [0, n). n must be nonzero.
  std::uint64_t below(std::uint64_t n);

  // Standard normal deviate (Box-Muller, one value per call).
  double normal();

  // Poisson deviate by sequential inversion; intended for small means.
  std::uint64_t poisson(double mean);

 private:
  std::mt19937_64 engine_;
};

// Independent stream seed for (seed, stream) via splitmix64 mixing.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

}  // namespace entangle
