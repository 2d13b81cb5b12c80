#pragma once

#include <cmath>
#include <cstdint>
#include <numeric>
#include <vector>

#include "hood/common.hpp"
#include "hood/matrix.hpp"

namespace hood {

/// Deterministic xorshift-family generator (splitmix64-seeded xoshiro256**).
/// The stream depends only on the seed, never on the standard library, so
/// identical seeds give identical draws on every platform. Single-owner:
/// copy it if two consumers need independent positions in the same stream.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : seed_(seed) {
    std::uint64_t x = seed;
    for (auto& word : state_) word = splitmix64(x);
  }

  std::uint64_t seed() const { return seed_; }

  std::uint64_t next_u64() {
    const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  /// Uniform double in [0, 1).
  double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Uniform integer in [0, bound). Rejection sampling keeps it unbiased.
  std::uint64_t next_below(std::uint64_t bound) {
    require(bound > 0, "Rng::next_below: bound must be positive");
    const std::uint64_t threshold = (0 - bound) % bound;
    for (;;) {
      const std::uint64_t r = next_u64();
      if (r >= threshold) return r % bound;
    }
  }

  /// Standard normal draw via Box-Muller (two uniforms per draw).
  double next_gaussian() {
    const double u1 = 1.0 - next_unit();  // (0, 1], keeps the log finite
    const double u2 = next_unit();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kPi * u2);
  }

  /// Fisher-Yates shuffle.
  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      const std::size_t j = static_cast<std::size_t>(next_below(i));
      std::swap(v[i - 1], v[j]);
    }
  }

  std::vector<std::size_t> permutation(std::size_t n) {
    std::vector<std::size_t> p(n);
    std::iota(p.begin(), p.end(), std::size_t{0});
    shuffle(p);
    return p;
  }

  /// Derive an independent child seed; used to split one run seed into
  /// per-purpose streams (init, batching, ...).
  static std::uint64_t mix(std::uint64_t seed, std::uint64_t salt) {
    std::uint64_t x = seed ^ (0x9e3779b97f4a7c15ULL + salt);
    return splitmix64(x);
  }

 private:
  static constexpr double kPi = 3.141592653589793238462643383279502884;

  static std::uint64_t splitmix64(std::uint64_t& x) {
    std::uint64_t z = (x += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

  std::uint64_t seed_ = 0;
  std::uint64_t state_[4] = {};
};

/// n-by-d matrix of i.i.d. normal draws scaled by std and shifted by mean.
/// mean may have one entry (broadcast) or d entries.
inline Matrix gaussian_sample(Rng& rng, std::size_t n, std::size_t d,
                              const std::vector<double>& mean, double std_dev) {
  require(std_dev > 0.0, "gaussian_sample: std must be positive");
  require(mean.size() == d || mean.size() == 1, "gaussian_sample: mean length must be d or 1");
  Matrix out(n, d);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < d; ++j)
      out(i, j) = mean[mean.size() == 1 ? 0 : j] + std_dev * rng.next_gaussian();
  return out;
}

}  // namespace hood
