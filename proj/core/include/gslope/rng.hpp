#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace gslope {

/// Seeded random stream used everywhere randomness appears (group-size draws,
/// synthetic data, mini-batch sampling). Built on std::mt19937_64 but with the
/// draw algorithms spelled out here, because std::*_distribution output is
/// implementation-defined and traces must reproduce bit-identically.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : seed_(seed), engine_(seed) {}

  std::uint64_t seed() const { return seed_; }

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform on [0, 1), 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Uniform integer on the inclusive range [lo, hi], unbiased (rejection).
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi);

  /// Standard normal, Box-Muller with the spare deviate cached.
  double normal();

  /// Partial Fisher-Yates: writes k distinct indices drawn uniformly from
  /// [0, n) into out. `scratch` must hold the identity permutation of size n
  /// on first use and is reused across calls.
  void sample_without_replacement(std::int64_t n, std::int64_t k,
                                  std::vector<std::int64_t>& scratch,
                                  std::vector<std::int64_t>& out);

  /// Derives an independent seed for a sub-task (trial index, solver arm, ...)
  /// without consuming this stream.
  std::uint64_t derive(std::uint64_t salt) const;

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace gslope
