#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "hood/independence.hpp"
#include "hood/rng.hpp"
#include "oracles.hpp"

using hood::KernelKind;
using hood::KernelSpec;
using hood::Matrix;

namespace {

const KernelSpec kRbf{KernelKind::Rbf, 1.5, 1.0};
const KernelSpec kLinear{KernelKind::Linear, 1.0, 1.0};
const KernelSpec kImq{KernelKind::Imq, 1.0, 1.2};

}  // namespace

TEST_CASE("hsic of constant features is zero") {
  Matrix z(8, 3);
  for (std::size_t i = 0; i < 8; ++i) {
    z(i, 0) = 2.0;
    z(i, 1) = -1.0;
    z(i, 2) = 0.5;
  }
  hood::Rng rng(3);
  const Matrix g = oracles::random_matrix(rng, 8, 3);
  for (const auto& spec : {kRbf, kLinear, kImq})
    REQUIRE(std::abs(hood::hsic_biased(z, g, spec).value) < 1e-12);
}

TEST_CASE("hand-evaluated linear-kernel case") {
  const Matrix z = Matrix::of({{1, 0}, {0, 0}});
  const Matrix g = Matrix::of({{1, 0}, {0, 0}});
  // cross-checked against the dense oracle below
  REQUIRE(hood::hsic_biased(z, g, kLinear).value == Catch::Approx(0.25).margin(1e-15));
  REQUIRE(oracles::hsic_dense(z, g, kLinear) == Catch::Approx(0.25).margin(1e-15));
}

TEST_CASE("hsic matches the dense explicit-H oracle") {
  hood::Rng rng(5);
  for (const auto& spec : {kRbf, kLinear, kImq}) {
    for (int trial = 0; trial < 10; ++trial) {
      const auto n = 3 + rng.next_below(10);
      const auto d = 1 + rng.next_below(5);
      const Matrix z = oracles::random_matrix(rng, n, d);
      const Matrix g = oracles::random_matrix(rng, n, d);
      const double got = hood::hsic_biased(z, g, spec).value;
      REQUIRE(got == Catch::Approx(oracles::hsic_dense(z, g, spec)).margin(1e-12));
    }
  }
}

TEST_CASE("hsic is symmetric and non-negative on random inputs") {
  hood::Rng rng(7);
  for (const auto& spec : {kRbf, kLinear, kImq}) {
    for (int trial = 0; trial < 10; ++trial) {
      const Matrix z = oracles::random_matrix(rng, 12, 4);
      const Matrix g = oracles::random_matrix(rng, 12, 4);
      const double zg = hood::hsic_biased(z, g, spec).value;
      const double gz = hood::hsic_biased(g, z, spec).value;
      REQUIRE(std::abs(zg - gz) < 1e-12);
      REQUIRE(zg >= -1e-12);
    }
  }
}

TEST_CASE("hsic is invariant under a shared row permutation") {
  hood::Rng rng(9);
  const Matrix z = oracles::random_matrix(rng, 10, 3);
  const Matrix g = oracles::random_matrix(rng, 10, 3);
  const auto pi = rng.permutation(10);
  Matrix zp(10, 3), gp(10, 3);
  for (std::size_t i = 0; i < 10; ++i)
    for (std::size_t j = 0; j < 3; ++j) {
      zp(i, j) = z(pi[i], j);
      gp(i, j) = g(pi[i], j);
    }
  for (const auto& spec : {kRbf, kLinear, kImq})
    REQUIRE(std::abs(hood::hsic_biased(z, g, spec).value -
                     hood::hsic_biased(zp, gp, spec).value) < 1e-12);
}

TEST_CASE("hsic row-count mismatch is rejected") {
  REQUIRE_THROWS_AS(hood::hsic_biased(Matrix(4, 2), Matrix(5, 2), kRbf),
                    hood::ContractViolation);
}

TEST_CASE("biased-estimator drift shrinks as n grows") {
  const std::vector<std::size_t> sizes = {16, 64, 256};
  std::vector<double> means;
  for (std::size_t n : sizes) {
    double total = 0.0;
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
      hood::Rng rng(1000 + seed);
      const Matrix z = oracles::random_matrix(rng, n, 3);
      const Matrix g = oracles::random_matrix(rng, n, 3);
      total += hood::hsic_biased(z, g, kRbf).value;
    }
    means.push_back(total / 50.0);
  }
  REQUIRE(means[0] > means[1]);
  REQUIRE(means[1] > means[2]);
}

TEST_CASE("linear covariance form: zero and orthogonal cases") {
  hood::Rng rng(11);
  const Matrix z = oracles::random_matrix(rng, 6, 3);
  REQUIRE(hood::hsic_linear_covariance(z, Matrix(6, 3)) == 0.0);
  // z varies only in column 0, g only in column 1, both centered; all
  // cross-column products cancel exactly
  Matrix zc(4, 2), gc(4, 2);
  const double vals[4] = {-1.5, -0.5, 0.5, 1.5};
  for (std::size_t i = 0; i < 4; ++i) {
    zc(i, 0) = vals[i];
    gc(i, 1) = vals[3 - i];
  }
  const double cross = vals[0] * vals[3] + vals[1] * vals[2] + vals[2] * vals[1] +
                       vals[3] * vals[0];  // the only nonzero entry of Z^T G
  REQUIRE(hood::hsic_linear_covariance(zc, gc) ==
          Catch::Approx(cross * cross / 9.0).margin(1e-12));
  Matrix g_orth(4, 2);
  g_orth(0, 0) = 1.0;
  g_orth(1, 0) = -1.0;
  g_orth(2, 0) = -1.0;
  g_orth(3, 0) = 1.0;  // orthogonal to (-1.5,-0.5,0.5,1.5)
  REQUIRE(std::abs(hood::hsic_linear_covariance(zc, g_orth)) < 1e-12);
}

TEST_CASE("linear-kernel hsic equals the covariance Frobenius form on centered features") {
  hood::Rng rng(13);
  for (int trial = 0; trial < 20; ++trial) {
    const auto n = 4 + rng.next_below(29);
    const auto d = 1 + rng.next_below(8);
    const Matrix z = hood::center_columns(oracles::random_matrix(rng, n, d));
    const Matrix g = hood::center_columns(oracles::random_matrix(rng, n, d));
    const double via_kernel = hood::hsic_biased(z, g, kLinear).value;
    const double via_cov = hood::hsic_linear_covariance(z, g);
    const double scale = std::max({std::abs(via_kernel), std::abs(via_cov), 1e-30});
    REQUIRE(std::abs(via_kernel - via_cov) / scale < 1e-10);
  }
}

TEST_CASE("mmd of identical samples is zero") {
  hood::Rng rng(17);
  const Matrix z = oracles::random_matrix(rng, 9, 4);
  for (const auto& spec : {kRbf, kLinear, kImq})
    REQUIRE(std::abs(hood::mmd_biased(z, z, spec)) < 1e-12);
}

TEST_CASE("mmd cross term vanishes for far-separated rbf clusters") {
  hood::Rng rng(19);
  Matrix z = oracles::random_matrix(rng, 8, 3, 0.1);
  Matrix g = oracles::random_matrix(rng, 8, 3, 0.1);
  for (std::size_t i = 0; i < 8; ++i) g(i, 0) += 1000.0;  // >> sigma
  const KernelSpec spec{KernelKind::Rbf, 1.0, 1.0};
  const double mmd = hood::mmd_biased(z, g, spec);
  double mzz = 0.0, mgg = 0.0;
  const Matrix kzz = kernel_matrix(z, spec).k;
  const Matrix kgg = kernel_matrix(g, spec).k;
  for (double v : kzz.data()) mzz += v;
  for (double v : kgg.data()) mgg += v;
  REQUIRE(mmd == Catch::Approx(mzz / 64.0 + mgg / 64.0).margin(1e-6));
}

TEST_CASE("mmd matches the double-loop oracle") {
  hood::Rng rng(23);
  for (const auto& spec : {kRbf, kLinear, kImq}) {
    const Matrix z = oracles::random_matrix(rng, 11, 4);
    const Matrix g = oracles::random_matrix(rng, 11, 4);
    REQUIRE(hood::mmd_biased(z, g, spec) ==
            Catch::Approx(oracles::mmd_double_loop(z, g, spec)).margin(1e-12));
  }
}

TEST_CASE("permutation test calibration under independence") {
  // also exercised at full scale by the acceptance suite
  std::size_t calibrated = 0;
  for (std::uint64_t trial = 0; trial < 25; ++trial) {
    hood::Rng rng(5000 + trial);
    const Matrix z = oracles::random_matrix(rng, 64, 3);
    const Matrix g = oracles::random_matrix(rng, 64, 3);
    hood::Rng perm_rng(9000 + trial);
    const auto res = hood::permutation_independence_test(z, g, kRbf, 99, perm_rng);
    if (res.p_value > 0.05) ++calibrated;
  }
  REQUIRE(calibrated >= 22);
}

TEST_CASE("permutation test flags maximal dependence") {
  hood::Rng rng(31);
  const Matrix z = oracles::random_matrix(rng, 64, 3);
  hood::Rng perm_rng(32);
  const auto res = hood::permutation_independence_test(z, z, kRbf, 99, perm_rng);
  REQUIRE(res.p_value <= 0.01);
  // no permutation reaches the observed statistic, so the floor is exact
  REQUIRE(res.p_value == Catch::Approx(0.01).margin(1e-15));
  REQUIRE(res.statistic == Catch::Approx(hood::hsic_biased(z, z, kRbf).value).margin(1e-15));
}

TEST_CASE("permutation test needs at least 99 permutations") {
  hood::Rng rng(37);
  const Matrix z = oracles::random_matrix(rng, 8, 2);
  hood::Rng perm_rng(38);
  REQUIRE_THROWS_AS(hood::permutation_independence_test(z, z, kRbf, 50, perm_rng),
                    hood::ContractViolation);
}
