#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "hood/kernels.hpp"
#include "hood/rng.hpp"
#include "oracles.hpp"

using hood::KernelKind;
using hood::KernelSpec;
using hood::Matrix;

namespace {

Matrix random_points(std::uint64_t seed, std::size_t n, std::size_t d) {
  hood::Rng rng(seed);
  return oracles::random_matrix(rng, n, d, 1.5);
}

}  // namespace

TEST_CASE("rbf diagonal is exactly one") {
  const Matrix x = random_points(1, 6, 4);
  const auto km = kernel_matrix(x, KernelSpec{KernelKind::Rbf, 2.0, 1.0});
  for (std::size_t i = 0; i < 6; ++i) REQUIRE(km.k(i, i) == 1.0);
}

TEST_CASE("rbf analytic value at squared distance two, sigma one") {
  const Matrix x = Matrix::of({{1.0, 0.0}, {0.0, 1.0}});  // ||x0-x1||^2 = 2
  const auto km = kernel_matrix(x, KernelSpec{KernelKind::Rbf, 1.0, 1.0});
  REQUIRE(km.k(0, 1) == Catch::Approx(std::exp(-1.0)).epsilon(1e-15));
}

TEST_CASE("default kernel spec carries the published temperature") {
  const KernelSpec spec;
  REQUIRE(spec.kind == KernelKind::Rbf);
  REQUIRE(spec.sigma == 5.0);
  REQUIRE(spec.imq_c == 1.0);
}

TEST_CASE("kernel matrices are symmetric for all kinds") {
  const Matrix x = random_points(2, 9, 5);
  for (auto kind : {KernelKind::Rbf, KernelKind::Linear, KernelKind::Imq}) {
    const auto km = kernel_matrix(x, KernelSpec{kind, 1.7, 0.9});
    REQUIRE(hood::max_abs_diff(km.k, hood::transpose(km.k)) < 1e-12);
  }
}

TEST_CASE("rbf entries live in (0,1] and decay with distance") {
  // collinear points: increasing pairwise distance along one ray
  Matrix x(5, 3);
  for (std::size_t i = 0; i < 5; ++i) x(i, 0) = static_cast<double>(i * i);
  const auto km = kernel_matrix(x, KernelSpec{KernelKind::Rbf, 3.0, 1.0});
  for (double v : km.k.data()) {
    REQUIRE(v > 0.0);
    REQUIRE(v <= 1.0);
  }
  for (std::size_t j = 2; j < 5; ++j) REQUIRE(km.k(0, j) < km.k(0, j - 1));
}

TEST_CASE("kernel matrices are positive semi-definite on small n") {
  for (auto kind : {KernelKind::Rbf, KernelKind::Linear, KernelKind::Imq}) {
    const Matrix x = random_points(3 + static_cast<int>(kind), 6, 3);
    const auto km = kernel_matrix(x, KernelSpec{kind, 1.2, 1.1});
    const auto eig = oracles::symmetric_eigenvalues(km.k);
    REQUIRE(eig.front() >= -1e-8);
  }
}

TEST_CASE("kernel_matrix contract checks") {
  REQUIRE_THROWS_AS(kernel_matrix(Matrix(1, 3), KernelSpec{}), hood::ContractViolation);
  Matrix bad(3, 2);
  bad(1, 1) = std::numeric_limits<double>::quiet_NaN();
  REQUIRE_THROWS_AS(kernel_matrix(bad, KernelSpec{}), hood::ContractViolation);
  REQUIRE_THROWS_AS(kernel_matrix(random_points(4, 3, 2), KernelSpec{KernelKind::Rbf, 0.0, 1.0}),
                    hood::ContractViolation);
}

TEST_CASE("centering a constant kernel gives zeros") {
  const hood::KernelMatrix km{Matrix(4, 4, 1.0), KernelSpec{}};
  const Matrix c = hood::center(km);
  for (double v : c.data()) REQUIRE(v == 0.0);
}

TEST_CASE("centering the 2x2 identity") {
  const hood::KernelMatrix km{Matrix::identity(2), KernelSpec{}};
  const Matrix c = hood::center(km);
  REQUIRE(c(0, 0) == 0.5);
  REQUIRE(c(0, 1) == -0.5);
  REQUIRE(c(1, 0) == -0.5);
  REQUIRE(c(1, 1) == 0.5);
}

TEST_CASE("centering matches the explicit K*H product") {
  hood::Rng rng(31);
  Matrix k = oracles::random_matrix(rng, 7, 7);
  // symmetrize like a real kernel matrix
  for (std::size_t i = 0; i < 7; ++i)
    for (std::size_t j = 0; j < i; ++j) k(i, j) = k(j, i);
  const Matrix via_product = oracles::naive_matmul(k, oracles::centering_matrix(7));
  const Matrix via_center = hood::center_rows(k);
  REQUIRE(hood::max_abs_diff(via_product, via_center) < 1e-12);
}

TEST_CASE("rows of the centered kernel matrix have zero mean") {
  const Matrix x = random_points(5, 8, 4);
  const auto km = kernel_matrix(x, KernelSpec{});
  const Matrix c = hood::center(km);
  for (std::size_t i = 0; i < c.rows(); ++i) {
    double mean = 0.0;
    for (std::size_t j = 0; j < c.cols(); ++j) mean += c(i, j);
    REQUIRE(std::abs(mean / static_cast<double>(c.cols())) < 1e-10);
  }
}

TEST_CASE("double centering matches H*K*H") {
  hood::Rng rng(37);
  Matrix k = oracles::random_matrix(rng, 6, 6);
  for (std::size_t i = 0; i < 6; ++i)
    for (std::size_t j = 0; j < i; ++j) k(i, j) = k(j, i);
  const Matrix h = oracles::centering_matrix(6);
  const Matrix expected = oracles::naive_matmul(oracles::naive_matmul(h, k), h);
  REQUIRE(hood::max_abs_diff(hood::double_center(k), expected) < 1e-12);
}
