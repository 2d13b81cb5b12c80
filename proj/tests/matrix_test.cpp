#include <catch2/catch_amalgamated.hpp>

#include "hood/matrix.hpp"
#include "hood/rng.hpp"
#include "oracles.hpp"

using hood::Matrix;

TEST_CASE("matmul identity leaves the operand unchanged") {
  const Matrix a = Matrix::of({{1.5, -2.0}, {0.25, 7.0}});
  REQUIRE(matmul(Matrix::identity(2), a) == a);
}

TEST_CASE("matmul analytic 2x2 by 2x1") {
  const Matrix a = Matrix::of({{1, 2}, {3, 4}});
  const Matrix b = Matrix::of({{0}, {1}});
  const Matrix c = matmul(a, b);
  REQUIRE(c(0, 0) == 2.0);
  REQUIRE(c(1, 0) == 4.0);
}

TEST_CASE("matmul matches the naive triple loop") {
  hood::Rng rng(11);
  const Matrix a = oracles::random_matrix(rng, 7, 5);
  const Matrix b = oracles::random_matrix(rng, 5, 3);
  REQUIRE(hood::max_abs_diff(matmul(a, b), oracles::naive_matmul(a, b)) < 1e-12);
}

TEST_CASE("matmul rejects mismatched inner dimensions") {
  REQUIRE_THROWS_AS(matmul(Matrix(2, 3), Matrix(2, 3)), hood::ContractViolation);
}

TEST_CASE("matmul associativity on random triples") {
  hood::Rng rng(23);
  for (int trial = 0; trial < 20; ++trial) {
    const Matrix a = oracles::random_matrix(rng, 4, 6);
    const Matrix b = oracles::random_matrix(rng, 6, 5);
    const Matrix c = oracles::random_matrix(rng, 5, 3);
    const Matrix left = matmul(matmul(a, b), c);
    const Matrix right = matmul(a, matmul(b, c));
    double scale = 0.0;
    for (double v : left.data()) scale = std::max(scale, std::abs(v));
    REQUIRE(hood::max_abs_diff(left, right) < 1e-9 * std::max(scale, 1.0));
  }
}

TEST_CASE("transpose and trace helpers") {
  const Matrix a = Matrix::of({{1, 2, 3}, {4, 5, 6}});
  const Matrix t = transpose(a);
  REQUIRE(t(2, 1) == 6.0);
  const Matrix sq = Matrix::of({{2, 9}, {1, 3}});
  REQUIRE(hood::trace(sq) == 5.0);
  hood::Rng rng(5);
  const Matrix x = oracles::random_matrix(rng, 4, 4);
  const Matrix y = oracles::random_matrix(rng, 4, 4);
  REQUIRE(hood::trace_of_product(x, y) ==
          Catch::Approx(hood::trace(oracles::naive_matmul(x, y))).margin(1e-12));
}
