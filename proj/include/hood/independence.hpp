#pragma once

#include <cstddef>
#include <vector>

#include "hood/common.hpp"
#include "hood/kernels.hpp"
#include "hood/matrix.hpp"
#include "hood/rng.hpp"

namespace hood {

struct HsicEstimate {
  double value = 0.0;
  std::size_t n = 0;
};

/// Biased HSIC estimate tr(K_z H K_g H) / (N-1)^2 between the rows of z and
/// the rows of g. Non-negative up to rounding for any legitimate kernel.
inline HsicEstimate hsic_biased(const Matrix& z, const Matrix& g, const KernelSpec& spec) {
  require(z.rows() == g.rows(), "hsic_biased: z and g must have the same row count");
  const std::size_t n = z.rows();
  const Matrix kz_c = center(kernel_matrix(z, spec));
  const Matrix kg_c = center(kernel_matrix(g, spec));
  const double denom = static_cast<double>(n - 1) * static_cast<double>(n - 1);
  return {trace_of_product(kz_c, kg_c) / denom, n};
}

/// Same statistic when both Gram matrices are already built; the permutation
/// test uses this to avoid recomputing kernels for every shuffle.
inline double hsic_biased_from_grams(const Matrix& kz, const Matrix& kg) {
  const std::size_t n = kz.rows();
  const double denom = static_cast<double>(n - 1) * static_cast<double>(n - 1);
  return trace_of_product(center_rows(kz), center_rows(kg)) / denom;
}

/// ||Z^T G||_F^2 / (N-1)^2. For column-centered features this equals the
/// linear-kernel biased HSIC; callers are responsible for the centering.
inline double hsic_linear_covariance(const Matrix& z, const Matrix& g) {
  require(z.rows() == g.rows(), "hsic_linear_covariance: row counts differ");
  double frob = 0.0;
  for (std::size_t a = 0; a < z.cols(); ++a) {
    for (std::size_t b = 0; b < g.cols(); ++b) {
      double c_ab = 0.0;
      for (std::size_t i = 0; i < z.rows(); ++i) c_ab += z(i, a) * g(i, b);
      frob += c_ab * c_ab;
    }
  }
  const double nm1 = static_cast<double>(z.rows() - 1);
  return frob / (nm1 * nm1);
}

/// Biased (V-statistic) MMD between the rows of z and g:
/// mean(K_zz) - 2*mean(K_zg) + mean(K_gg), diagonals included.
inline double mmd_biased(const Matrix& z, const Matrix& g, const KernelSpec& spec) {
  require(z.rows() == g.rows(), "mmd_biased: z and g must have the same row count");
  require(z.rows() >= 2, "mmd_biased: need at least 2 rows");
  const std::size_t n = z.rows();
  const Matrix kzz = kernel_matrix(z, spec).k;
  const Matrix kgg = kernel_matrix(g, spec).k;
  const Matrix kzg = cross_kernel_matrix(z, g, spec);
  double mzz = 0.0, mgg = 0.0, mzg = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      mzz += kzz(i, j);
      mgg += kgg(i, j);
      mzg += kzg(i, j);
    }
  const double nn = static_cast<double>(n) * static_cast<double>(n);
  return mzz / nn - 2.0 * mzg / nn + mgg / nn;
}

struct PermutationTestResult {
  double statistic = 0.0;
  double p_value = 1.0;
  std::size_t permutations = 0;
};

/// Permutation test of independence with HSIC as the statistic. Row-permuting
/// g permutes K_g symmetrically, so the Gram matrices are built once.
inline PermutationTestResult permutation_independence_test(const Matrix& z, const Matrix& g,
                                                           const KernelSpec& spec,
                                                           std::size_t permutations, Rng& rng) {
  require(permutations >= 99, "permutation_independence_test: need at least 99 permutations");
  require(z.rows() == g.rows(), "permutation_independence_test: row counts differ");
  const std::size_t n = z.rows();
  const Matrix kz = kernel_matrix(z, spec).k;
  const Matrix kg = kernel_matrix(g, spec).k;
  const double observed = hsic_biased_from_grams(kz, kg);

  std::size_t at_least = 0;
  Matrix kg_perm(n, n);
  for (std::size_t p = 0; p < permutations; ++p) {
    const std::vector<std::size_t> pi = rng.permutation(n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) kg_perm(i, j) = kg(pi[i], pi[j]);
    if (hsic_biased_from_grams(kz, kg_perm) >= observed) ++at_least;
  }
  const double p_value =
      static_cast<double>(1 + at_least) / static_cast<double>(permutations + 1);
  return {observed, p_value, permutations};
}

// ---------------------------------------------------------------------------
// Gradients. Training needs d HSIC / d z and d HSIC / d g (and the MMD
// analogues); the derivative of the trace w.r.t. one Gram matrix is the
// doubly centered other one, and the kernel chain rule does the rest.
// ---------------------------------------------------------------------------

/// Accumulate coeff(i,j) * d k(x_i, x_j) / dx into dx for a self Gram matrix.
/// k holds the forward kernel values.
inline void self_kernel_backward(const Matrix& x, const Matrix& k, const Matrix& coeff,
                                 const KernelSpec& spec, Matrix& dx) {
  const std::size_t n = x.rows();
  const std::size_t d = x.cols();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const double w = coeff(i, j) + coeff(j, i);  // K_ij and K_ji both touch x_i
      if (w == 0.0) continue;
      switch (spec.kind) {
        case KernelKind::Rbf: {
          const double f = -w * k(i, j) / (spec.sigma * spec.sigma);
          for (std::size_t a = 0; a < d; ++a) dx(i, a) += f * (x(i, a) - x(j, a));
          break;
        }
        case KernelKind::Linear: {
          for (std::size_t a = 0; a < d; ++a) dx(i, a) += w * x(j, a);
          break;
        }
        case KernelKind::Imq: {
          const double kij = k(i, j);
          const double f = -w * kij * kij * kij;
          for (std::size_t a = 0; a < d; ++a) dx(i, a) += f * (x(i, a) - x(j, a));
          break;
        }
      }
    }
  }
}

/// Accumulate coeff(i,j) * d k(x_i, y_j) / d{x,y} into dx and dy for a cross
/// Gram matrix.
inline void cross_kernel_backward(const Matrix& x, const Matrix& y, const Matrix& k,
                                  const Matrix& coeff, const KernelSpec& spec, Matrix& dx,
                                  Matrix& dy) {
  const std::size_t d = x.cols();
  for (std::size_t i = 0; i < x.rows(); ++i) {
    for (std::size_t j = 0; j < y.rows(); ++j) {
      const double w = coeff(i, j);
      if (w == 0.0) continue;
      switch (spec.kind) {
        case KernelKind::Rbf: {
          const double f = -w * k(i, j) / (spec.sigma * spec.sigma);
          for (std::size_t a = 0; a < d; ++a) {
            const double diff = x(i, a) - y(j, a);
            dx(i, a) += f * diff;
            dy(j, a) -= f * diff;
          }
          break;
        }
        case KernelKind::Linear: {
          for (std::size_t a = 0; a < d; ++a) {
            dx(i, a) += w * y(j, a);
            dy(j, a) += w * x(i, a);
          }
          break;
        }
        case KernelKind::Imq: {
          const double kij = k(i, j);
          const double f = -w * kij * kij * kij;
          for (std::size_t a = 0; a < d; ++a) {
            const double diff = x(i, a) - y(j, a);
            dx(i, a) += f * diff;
            dy(j, a) -= f * diff;
          }
          break;
        }
      }
    }
  }
}

/// Biased HSIC plus its gradients w.r.t. both feature matrices. dz and dg are
/// accumulated (scaled by weight), so callers can sum several estimates.
inline double hsic_biased_with_grad(const Matrix& z, const Matrix& g, const KernelSpec& spec,
                                    double weight, Matrix& dz, Matrix& dg) {
  require(z.rows() == g.rows(), "hsic_biased_with_grad: row counts differ");
  const std::size_t n = z.rows();
  const double denom = static_cast<double>(n - 1) * static_cast<double>(n - 1);
  const Matrix kz = kernel_matrix(z, spec).k;
  const Matrix kg = kernel_matrix(g, spec).k;
  const double value = trace_of_product(center_rows(kz), center_rows(kg)) / denom;

  // d value / d K_z = H K_g H / (N-1)^2, and symmetrically for K_g.
  Matrix coeff_z = double_center(kg);
  Matrix coeff_g = double_center(kz);
  const double scale = weight / denom;
  for (double& v : coeff_z.data()) v *= scale;
  for (double& v : coeff_g.data()) v *= scale;
  self_kernel_backward(z, kz, coeff_z, spec, dz);
  self_kernel_backward(g, kg, coeff_g, spec, dg);
  return value;
}

/// Biased MMD plus gradients, same accumulation convention as above.
inline double mmd_biased_with_grad(const Matrix& z, const Matrix& g, const KernelSpec& spec,
                                   double weight, Matrix& dz, Matrix& dg) {
  require(z.rows() == g.rows(), "mmd_biased_with_grad: row counts differ");
  const std::size_t n = z.rows();
  const double nn = static_cast<double>(n) * static_cast<double>(n);
  const Matrix kzz = kernel_matrix(z, spec).k;
  const Matrix kgg = kernel_matrix(g, spec).k;
  const Matrix kzg = cross_kernel_matrix(z, g, spec);

  double mzz = 0.0, mgg = 0.0, mzg = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      mzz += kzz(i, j);
      mgg += kgg(i, j);
      mzg += kzg(i, j);
    }
  const double value = mzz / nn - 2.0 * mzg / nn + mgg / nn;

  const Matrix coeff_self(n, n, weight / nn);
  const Matrix coeff_cross(n, n, -2.0 * weight / nn);
  self_kernel_backward(z, kzz, coeff_self, spec, dz);
  self_kernel_backward(g, kgg, coeff_self, spec, dg);
  cross_kernel_backward(z, g, kzg, coeff_cross, spec, dz, dg);
  return value;
}

}  // namespace hood
