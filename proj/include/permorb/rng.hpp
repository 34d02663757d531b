#pragma once

#include <cstdint>
#include <cstddef>

namespace permorb {

/// Seed for the library generator. Every seeded operation reports it.
struct RngSeed {
  std::uint64_t value = 0;
};

/// splitmix64 finalizer; used for seeding and for deriving sub-streams.
std::uint64_t splitmix64(std::uint64_t& state);

/// Deterministic seed for an independent stream `stream` under `seed`.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

/// xoshiro256** generator. The stream depends only on the seed and on the
/// sequence of calls; no std:: distributions are involved, so the output is
/// identical across standard library implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);
  explicit Rng(RngSeed seed) : Rng(seed.value) {}

  std::uint64_t next_u64();

  /// Uniform on [0, 1) with 53 random bits.
  double uniform01();
  double uniform(double lo, double hi);

  /// Standard normal (Marsaglia polar method).
  double normal();

  /// Uniform integer in [0, bound). bound must be positive.
  std::size_t below(std::size_t bound);

 private:
  std::uint64_t s_[4];
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace permorb
