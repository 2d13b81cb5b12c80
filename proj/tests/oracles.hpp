// Brute-force reference implementations used only by tests. Everything here
// deliberately follows the definitions directly (explicit centering matrices,
// per-pair loops, exhaustive threshold scans) instead of the library's
// computation paths.
#pragma once

#include <algorithm>
#include <cmath>
#include <set>
#include <vector>

#include "hood/encoder.hpp"
#include "hood/kernels.hpp"
#include "hood/matrix.hpp"
#include "hood/metrics.hpp"
#include "hood/rng.hpp"

namespace oracles {

using hood::Matrix;

inline Matrix naive_matmul(const Matrix& a, const Matrix& b) {
  Matrix c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < b.cols(); ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < a.cols(); ++k) s += a(i, k) * b(k, j);
      c(i, j) = s;
    }
  return c;
}

inline Matrix centering_matrix(std::size_t n) {
  Matrix h(n, n, -1.0 / static_cast<double>(n));
  for (std::size_t i = 0; i < n; ++i) h(i, i) += 1.0;
  return h;
}

inline double kernel_entry(const Matrix& x, std::size_t i, const Matrix& y, std::size_t j,
                           const hood::KernelSpec& spec) {
  double d2 = 0.0, dot = 0.0;
  for (std::size_t k = 0; k < x.cols(); ++k) {
    const double diff = x(i, k) - y(j, k);
    d2 += diff * diff;
    dot += x(i, k) * y(j, k);
  }
  switch (spec.kind) {
    case hood::KernelKind::Rbf: return std::exp(-d2 / (2.0 * spec.sigma * spec.sigma));
    case hood::KernelKind::Linear: return dot;
    case hood::KernelKind::Imq: return 1.0 / std::sqrt(d2 + spec.imq_c);
  }
  return 0.0;
}

inline Matrix gram(const Matrix& x, const hood::KernelSpec& spec) {
  Matrix k(x.rows(), x.rows());
  for (std::size_t i = 0; i < x.rows(); ++i)
    for (std::size_t j = 0; j < x.rows(); ++j) k(i, j) = kernel_entry(x, i, x, j, spec);
  return k;
}

/// tr(K_z H K_g H) / (N-1)^2 with the centering matrix formed explicitly.
inline double hsic_dense(const Matrix& z, const Matrix& g, const hood::KernelSpec& spec) {
  const std::size_t n = z.rows();
  const Matrix h = centering_matrix(n);
  const Matrix prod = naive_matmul(naive_matmul(naive_matmul(gram(z, spec), h), gram(g, spec)), h);
  double tr = 0.0;
  for (std::size_t i = 0; i < n; ++i) tr += prod(i, i);
  const double nm1 = static_cast<double>(n - 1);
  return tr / (nm1 * nm1);
}

/// mean(K_zz) - 2 mean(K_zg) + mean(K_gg) by direct double loops.
inline double mmd_double_loop(const Matrix& z, const Matrix& g, const hood::KernelSpec& spec) {
  const double n = static_cast<double>(z.rows());
  const double m = static_cast<double>(g.rows());
  double t1 = 0.0, t2 = 0.0, t3 = 0.0;
  for (std::size_t i = 0; i < z.rows(); ++i)
    for (std::size_t j = 0; j < z.rows(); ++j) t1 += kernel_entry(z, i, z, j, spec);
  for (std::size_t i = 0; i < z.rows(); ++i)
    for (std::size_t j = 0; j < g.rows(); ++j) t2 += kernel_entry(z, i, g, j, spec);
  for (std::size_t i = 0; i < g.rows(); ++i)
    for (std::size_t j = 0; j < g.rows(); ++j) t3 += kernel_entry(g, i, g, j, spec);
  return t1 / (n * n) - 2.0 * t2 / (n * m) + t3 / (m * m);
}

/// Central finite differences of the configured loss w.r.t. every parameter.
inline hood::EncoderGrad fd_gradient(hood::EncoderParams params, const hood::LabeledBatch& batch,
                                     const hood::TrainConfig& cfg, double h = 1e-5) {
  hood::EncoderGrad grad = hood::zero_grad_like(params);
  const auto p_refs = hood::param_refs(params);
  const auto g_refs = hood::param_refs(grad);
  for (std::size_t i = 0; i < p_refs.size(); ++i) {
    const double saved = *p_refs[i].value;
    *p_refs[i].value = saved + h;
    const double up = hood::evaluate_loss(params, batch, cfg).total;
    *p_refs[i].value = saved - h;
    const double down = hood::evaluate_loss(params, batch, cfg).total;
    *p_refs[i].value = saved;
    *g_refs[i].value = (up - down) / (2.0 * h);
  }
  return grad;
}

inline double max_rel_grad_error(const hood::EncoderGrad& a, const hood::EncoderGrad& b) {
  hood::EncoderGrad& aa = const_cast<hood::EncoderGrad&>(a);
  hood::EncoderGrad& bb = const_cast<hood::EncoderGrad&>(b);
  const auto ra = hood::param_refs(aa);
  const auto rb = hood::param_refs(bb);
  double worst = 0.0;
  for (std::size_t i = 0; i < ra.size(); ++i) {
    const double va = *ra[i].value, vb = *rb[i].value;
    const double scale = std::max({std::abs(va), std::abs(vb), 1e-6});
    worst = std::max(worst, std::abs(va - vb) / scale);
  }
  return worst;
}

// --- metric oracles --------------------------------------------------------

/// Exhaustive threshold scan: among all realized scores t with
/// TPR(t) >= target (admitted means score >= t), take the largest t.
inline double fpr_scan(const std::vector<hood::ScoredSample>& samples, double target) {
  std::vector<double> in, out;
  for (const auto& s : samples) (s.is_inlier ? in : out).push_back(s.score);
  std::set<double> thresholds(in.begin(), in.end());
  for (double s : out) thresholds.insert(s);
  double best_t = 0.0;
  bool found = false;
  for (double t : thresholds) {
    std::size_t admitted = 0;
    for (double s : in)
      if (s >= t) ++admitted;
    if (static_cast<double>(admitted) / static_cast<double>(in.size()) >= target) {
      if (!found || t > best_t) best_t = t;
      found = true;
    }
  }
  std::size_t fp = 0;
  for (double s : out)
    if (s >= best_t) ++fp;
  return static_cast<double>(fp) / static_cast<double>(out.size());
}

/// O(n^2) pair counting with half credit for ties.
inline double auroc_pairs(const std::vector<hood::ScoredSample>& samples) {
  std::vector<double> in, out;
  for (const auto& s : samples) (s.is_inlier ? in : out).push_back(s.score);
  double wins = 0.0;
  for (double a : in)
    for (double b : out) {
      if (a > b) wins += 1.0;
      else if (a == b) wins += 0.5;
    }
  return wins / (static_cast<double>(in.size()) * static_cast<double>(out.size()));
}

/// Step-by-step average precision: outliers positive, admitted means
/// score <= t, thresholds at every distinct score in ascending order, each
/// step recounted from scratch.
inline double aupr_scan(const std::vector<hood::ScoredSample>& samples) {
  std::vector<double> all;
  std::size_t n_out = 0;
  for (const auto& s : samples) {
    all.push_back(s.score);
    if (!s.is_inlier) ++n_out;
  }
  std::set<double> thresholds(all.begin(), all.end());
  double ap = 0.0, recall_prev = 0.0;
  for (double t : thresholds) {
    std::size_t tp = 0, admitted = 0;
    for (const auto& s : samples) {
      if (s.score <= t) {
        ++admitted;
        if (!s.is_inlier) ++tp;
      }
    }
    const double recall = static_cast<double>(tp) / static_cast<double>(n_out);
    const double precision = static_cast<double>(tp) / static_cast<double>(admitted);
    ap += (recall - recall_prev) * precision;
    recall_prev = recall;
  }
  return ap;
}

// --- misc helpers ----------------------------------------------------------

inline Matrix random_matrix(hood::Rng& rng, std::size_t rows, std::size_t cols,
                            double scale = 1.0) {
  Matrix m(rows, cols);
  for (double& v : m.data()) v = scale * rng.next_gaussian();
  return m;
}

/// Eigenvalues of a small symmetric matrix via cyclic Jacobi sweeps.
inline std::vector<double> symmetric_eigenvalues(Matrix a, int sweeps = 50) {
  const std::size_t n = a.rows();
  for (int s = 0; s < sweeps; ++s) {
    double off = 0.0;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
    if (off < 1e-24) break;
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        if (std::abs(a(p, q)) < 1e-18) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * a(p, q));
        const double t = (theta >= 0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double sn = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - sn * akq;
          a(k, q) = sn * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk - sn * aqk;
          a(q, k) = sn * apk + c * aqk;
        }
      }
    }
  }
  std::vector<double> eig(n);
  for (std::size_t i = 0; i < n; ++i) eig[i] = a(i, i);
  std::sort(eig.begin(), eig.end());
  return eig;
}

}  // namespace oracles
