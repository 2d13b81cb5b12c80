#pragma once

#include <cmath>
#include <string>

#include "hood/common.hpp"
#include "hood/matrix.hpp"

namespace hood {

enum class KernelKind { Rbf, Linear, Imq };

inline std::string kernel_kind_name(KernelKind k) {
  switch (k) {
    case KernelKind::Rbf: return "rbf";
    case KernelKind::Linear: return "linear";
    case KernelKind::Imq: return "imq";
  }
  return "?";
}

inline KernelKind parse_kernel_kind(const std::string& s) {
  if (s == "rbf") return KernelKind::Rbf;
  if (s == "linear") return KernelKind::Linear;
  if (s == "imq") return KernelKind::Imq;
  throw ContractViolation("unknown kernel kind '" + s + "' (expected rbf, linear or imq)");
}

struct KernelSpec {
  KernelKind kind = KernelKind::Rbf;
  double sigma = 5.0;  // RBF temperature
  double imq_c = 1.0;  // inverse multi-quadratic offset

  void validate() const {
    require(sigma > 0.0, "KernelSpec: sigma must be positive");
    require(imq_c > 0.0, "KernelSpec: imq_c must be positive");
  }
};

/// Single kernel evaluation between row i of x and row j of y.
inline double kernel_value(const Matrix& x, std::size_t i, const Matrix& y, std::size_t j,
                           const KernelSpec& spec) {
  switch (spec.kind) {
    case KernelKind::Rbf:
      return std::exp(-squared_distance(x, i, y, j) / (2.0 * spec.sigma * spec.sigma));
    case KernelKind::Linear:
      return row_dot(x, i, y, j);
    case KernelKind::Imq:
      return 1.0 / std::sqrt(squared_distance(x, i, y, j) + spec.imq_c);
  }
  return 0.0;
}

struct KernelMatrix {
  Matrix k;
  KernelSpec spec;
};

/// N-by-N Gram matrix of the rows of x. Symmetry is exact: each off-diagonal
/// entry is computed once and mirrored.
inline KernelMatrix kernel_matrix(const Matrix& x, const KernelSpec& spec) {
  spec.validate();
  require(x.rows() >= 2, "kernel_matrix: need at least 2 rows");
  require(x.all_finite(), "kernel_matrix: input has non-finite entries");
  const std::size_t n = x.rows();
  KernelMatrix out{Matrix(n, n), spec};
  for (std::size_t i = 0; i < n; ++i) {
    out.k(i, i) = kernel_value(x, i, x, i, spec);
    for (std::size_t j = i + 1; j < n; ++j) {
      const double v = kernel_value(x, i, x, j, spec);
      out.k(i, j) = v;
      out.k(j, i) = v;
    }
  }
  return out;
}

/// Cross Gram matrix between the rows of x (rows) and the rows of y (cols).
inline Matrix cross_kernel_matrix(const Matrix& x, const Matrix& y, const KernelSpec& spec) {
  spec.validate();
  require(x.cols() == y.cols(), "cross_kernel_matrix: feature dimensions differ");
  Matrix k(x.rows(), y.rows());
  for (std::size_t i = 0; i < x.rows(); ++i)
    for (std::size_t j = 0; j < y.rows(); ++j) k(i, j) = kernel_value(x, i, y, j, spec);
  return k;
}

inline Matrix center_rows(const Matrix& k) {
  require(k.rows() == k.cols(), "center: kernel matrix must be square");
  Matrix out = k;
  const std::size_t n = k.rows();
  for (std::size_t i = 0; i < n; ++i) {
    double mean = 0.0;
    for (std::size_t j = 0; j < n; ++j) mean += k(i, j);
    mean /= static_cast<double>(n);
    for (std::size_t j = 0; j < n; ++j) out(i, j) -= mean;
  }
  return out;
}

/// K*H with H = I - (1/N)*11^T: subtracts each row's mean from that row.
/// Trace cyclicity makes tr(K_z H K_g H) = tr((K_z H)(K_g H)), so one
/// centering per kernel matrix is enough.
inline Matrix center(const KernelMatrix& km) { return center_rows(km.k); }

/// H*K*H: row centering followed by column centering. Used by gradients,
/// where the coefficient on K_z is the doubly centered K_g and vice versa.
inline Matrix double_center(const Matrix& k) { return center_columns(center_rows(k)); }

}  // namespace hood
