#pragma once

#include <cmath>
#include <cstddef>
#include <tuple>
#include <vector>

#include "hood/common.hpp"
#include "hood/encoder.hpp"
#include "hood/matrix.hpp"

namespace hood {

/// Per-class arithmetic means of training inlier features.
struct ClassMeans {
  Matrix mu;                       // C x d
  std::vector<std::size_t> counts; // per-class sample counts
};

inline ClassMeans class_means(const Matrix& z_train, const std::vector<int>& labels) {
  require(labels.size() == z_train.rows(), "class_means: labels length mismatch");
  int max_label = -1;
  for (int y : labels) {
    require(y >= 0, "class_means: negative label");
    max_label = std::max(max_label, y);
  }
  require(max_label >= 0, "class_means: no samples");
  const std::size_t classes = static_cast<std::size_t>(max_label) + 1;
  ClassMeans cm{Matrix(classes, z_train.cols()), std::vector<std::size_t>(classes, 0)};
  for (std::size_t i = 0; i < z_train.rows(); ++i) {
    const std::size_t c = static_cast<std::size_t>(labels[i]);
    cm.counts[c] += 1;
    for (std::size_t j = 0; j < z_train.cols(); ++j) cm.mu(c, j) += z_train(i, j);
  }
  for (std::size_t c = 0; c < classes; ++c) {
    require(cm.counts[c] >= 1, "class_means: class " + std::to_string(c) + " has no samples");
    for (std::size_t j = 0; j < z_train.cols(); ++j)
      cm.mu(c, j) /= static_cast<double>(cm.counts[c]);
  }
  return cm;
}

/// Correlation test statistic: the largest absolute inner product between the
/// test feature and any class mean. Low values flag OOD.
inline double cor_score(const ClassMeans& means, const std::vector<double>& q) {
  require(q.size() == means.mu.cols(), "cor_score: feature length mismatch");
  double best = 0.0;
  for (std::size_t c = 0; c < means.mu.rows(); ++c) {
    double dot = 0.0;
    for (std::size_t j = 0; j < q.size(); ++j) dot += means.mu(c, j) * q[j];
    best = std::max(best, std::abs(dot));
  }
  return best;
}

/// Maximum softmax probability of the classifier on one feature vector.
inline double msp_score(const EncoderParams& params, const std::vector<double>& q) {
  require(q.size() == params.classifier.cols(), "msp_score: feature length mismatch");
  const std::size_t classes = params.class_count();
  std::vector<double> logits(classes);
  for (std::size_t c = 0; c < classes; ++c) {
    double s = 0.0;
    for (std::size_t j = 0; j < q.size(); ++j) s += params.classifier(c, j) * q[j];
    logits[c] = s;
  }
  double mx = logits[0];
  for (double v : logits) mx = std::max(mx, v);
  double denom = 0.0;
  for (double v : logits) denom += std::exp(v - mx);
  double best = 0.0;
  for (double v : logits) best = std::max(best, std::exp(v - mx) / denom);
  return best;
}

enum class Verdict { Ood, Inlier };

/// Thresholding rule: a sample is OOD exactly when its score is at or below
/// the threshold.
inline Verdict classify(double score, double tau) {
  return score <= tau ? Verdict::Ood : Verdict::Inlier;
}

struct BoundCheck {
  double lhs = 0.0;   // |mu^T q|
  double rhs = 0.0;   // (1/N) sum_{j,i} |z_{i,j} q_i|, the triangle-inequality bound
  double frob = 0.0;  // ||Z^T G||_F^2 with q repeated as every row of G
};

/// Relates the correlation statistic of one class to the linear-kernel
/// cross-covariance energy: lhs <= rhs always, and zero energy forces a zero
/// statistic.
inline BoundCheck appendix_bound_check(const Matrix& z_train, const std::vector<double>& q) {
  require(q.size() == z_train.cols(), "appendix_bound_check: feature length mismatch");
  require(z_train.rows() >= 1, "appendix_bound_check: need at least one sample");
  const std::size_t n = z_train.rows();
  const std::size_t d = z_train.cols();
  BoundCheck out;

  double lhs = 0.0;
  for (std::size_t i = 0; i < d; ++i) {
    double mu_i = 0.0;
    for (std::size_t j = 0; j < n; ++j) mu_i += z_train(j, i);
    lhs += (mu_i / static_cast<double>(n)) * q[i];
  }
  out.lhs = std::abs(lhs);

  double rhs = 0.0;
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = 0; i < d; ++i) rhs += std::abs(z_train(j, i) * q[i]);
  out.rhs = rhs / static_cast<double>(n);

  // C = Z^T G with G = [q; q; ...; q], so C(a,b) = (sum_j z_{a,j}) * q_b.
  double frob = 0.0;
  for (std::size_t a = 0; a < d; ++a) {
    double col_sum = 0.0;
    for (std::size_t j = 0; j < n; ++j) col_sum += z_train(j, a);
    for (std::size_t b = 0; b < d; ++b) {
      const double c_ab = col_sum * q[b];
      frob += c_ab * c_ab;
    }
  }
  out.frob = frob;
  return out;
}

/// Feature extraction for one sample as a plain vector.
inline std::vector<double> encode_row(const EncoderParams& params, const Matrix& x,
                                      std::size_t row) {
  Matrix one(1, x.cols());
  for (std::size_t j = 0; j < x.cols(); ++j) one(0, j) = x(row, j);
  const Matrix z = forward(params, one);
  return z.row(0);
}

}  // namespace hood
