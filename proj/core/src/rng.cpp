#include "gslope/rng.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace gslope {

std::int64_t Rng::uniform_int(std::int64_t lo, std::int64_t hi) {
  if (lo > hi) throw std::invalid_argument("uniform_int: lo > hi");
  const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
  if (span == 0) return static_cast<std::int64_t>(engine_());  // full range
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % span;
  std::uint64_t draw;
  do {
    draw = engine_();
  } while (draw >= limit);
  return lo + static_cast<std::int64_t>(draw % span);
}

double Rng::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  const double u1 = 1.0 - uniform();  // (0, 1]
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double a = 2.0 * std::numbers::pi * u2;
  spare_ = r * std::sin(a);
  has_spare_ = true;
  return r * std::cos(a);
}

void Rng::sample_without_replacement(std::int64_t n, std::int64_t k,
                                     std::vector<std::int64_t>& scratch,
                                     std::vector<std::int64_t>& out) {
  if (k > n) throw std::invalid_argument("sample_without_replacement: k > n");
  if (static_cast<std::int64_t>(scratch.size()) != n) {
    scratch.resize(n);
    for (std::int64_t i = 0; i < n; ++i) scratch[i] = i;
  }
  out.resize(k);
  for (std::int64_t i = 0; i < k; ++i) {
    const std::int64_t j = uniform_int(i, n - 1);
    std::swap(scratch[i], scratch[j]);
    out[i] = scratch[i];
  }
}

std::uint64_t Rng::derive(std::uint64_t salt) const {
  // splitmix64 finalizer over (seed, salt)
  std::uint64_t z = seed_ + (salt + 1) * 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace gslope
