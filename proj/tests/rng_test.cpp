#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "hood/rng.hpp"

using hood::Matrix;
using hood::Rng;

TEST_CASE("gaussian_sample with near-zero spread hugs the mean") {
  Rng rng(3);
  const Matrix m = hood::gaussian_sample(rng, 50, 2, {5.0, 5.0}, 1e-9);
  for (double v : m.data()) REQUIRE(std::abs(v - 5.0) < 1e-6);
}

TEST_CASE("gaussian_sample rejects non-positive std") {
  Rng rng(3);
  REQUIRE_THROWS_AS(hood::gaussian_sample(rng, 2, 2, {0.0}, 0.0), hood::ContractViolation);
  REQUIRE_THROWS_AS(hood::gaussian_sample(rng, 2, 2, {0.0}, -1.0), hood::ContractViolation);
}

TEST_CASE("same seed gives bit-identical matrices") {
  Rng a(42), b(42);
  const Matrix ma = hood::gaussian_sample(a, 20, 5, {0.0}, 1.0);
  const Matrix mb = hood::gaussian_sample(b, 20, 5, {0.0}, 1.0);
  REQUIRE(ma == mb);
}

TEST_CASE("law of large numbers on 10000 draws") {
  Rng rng(7);
  const Matrix m = hood::gaussian_sample(rng, 10000, 1, {0.0}, 1.0);
  double mean = 0.0;
  for (double v : m.data()) mean += v;
  mean /= 10000.0;
  double var = 0.0;
  for (double v : m.data()) var += (v - mean) * (v - mean);
  var /= 10000.0;
  REQUIRE(std::abs(mean) < 0.05);
  REQUIRE(std::abs(std::sqrt(var) - 1.0) < 0.05);
}

TEST_CASE("streams are reproducible over 10^4 draws") {
  Rng a(123456789ULL), b(123456789ULL);
  for (int i = 0; i < 10000; ++i) REQUIRE(a.next_u64() == b.next_u64());
}

TEST_CASE("different seeds give different streams") {
  Rng a(1), b(2);
  bool differs = false;
  for (int i = 0; i < 10 && !differs; ++i) differs = a.next_u64() != b.next_u64();
  REQUIRE(differs);
}

TEST_CASE("permutation covers every index once") {
  Rng rng(9);
  const auto p = rng.permutation(257);
  std::vector<bool> seen(257, false);
  for (auto idx : p) {
    REQUIRE(idx < 257);
    REQUIRE(!seen[idx]);
    seen[idx] = true;
  }
}

TEST_CASE("next_below stays in range and hits both ends") {
  Rng rng(17);
  bool low = false, high = false;
  for (int i = 0; i < 1000; ++i) {
    const auto v = rng.next_below(7);
    REQUIRE(v < 7);
    low = low || v == 0;
    high = high || v == 6;
  }
  REQUIRE(low);
  REQUIRE(high);
}
