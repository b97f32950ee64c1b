#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <vector>

#include "postadc/errors.hpp"

namespace postadc {

//! 64-bit finalizer of the splitmix64 generator (Steele, Lea, Flood 2014).
//! Every stream of auxiliary randomness in the project is derived from it,
//! so serial and parallel runs agree bit for bit.
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

//! Combines a base seed with a stream/replicate index into a new seed.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index) {
  return mix64(mix64(seed) ^ (index + 0x9e3779b97f4a7c15ULL));
}

//! Counter-based deterministic generator: output i is mix64(key + i).
//! Stateless apart from the counter, cheap to fork, identical on every
//! platform (no dependence on std::*_distribution internals).
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() { return mix64(state_++); }

  //! Uniform double in (0, 1].
  double next_unit() {
    return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
  }

  //! Uniform integer in [0, bound). bound must be positive.
  std::uint64_t next_below(std::uint64_t bound) {
    // Plain modulo: the bias is irrelevant for bounds << 2^64 and the
    // result is reproducible everywhere.
    return next_u64() % bound;
  }

  //! Standard normal via Box-Muller, one deviate per pair of uniforms.
  double next_gaussian() {
    const double u1 = next_unit();
    const double u2 = next_unit();
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * std::numbers::pi * u2);
  }

 private:
  std::uint64_t state_;
};

//! k distinct indices uniform over {0, ..., n-1}, by partial Fisher-Yates.
inline std::vector<int> sample_without_replacement(int n, int k,
                                                   SplitMix64& rng) {
  if (k < 0 || k > n) {
    throw ConfigError("sample_without_replacement: k out of range");
  }
  std::vector<int> pool(n);
  for (int i = 0; i < n; ++i) pool[i] = i;
  std::vector<int> out(k);
  for (int i = 0; i < k; ++i) {
    const int j = i + static_cast<int>(rng.next_below(n - i));
    std::swap(pool[i], pool[j]);
    out[i] = pool[i];
  }
  return out;
}

}  // namespace postadc
