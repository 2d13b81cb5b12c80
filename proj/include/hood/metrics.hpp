#pragma once

#include <algorithm>
#include <cstddef>
#include <vector>

#include "hood/common.hpp"

namespace hood {

/// One test sample: detection score (higher = more inlier-like) plus ground
/// truth. Scores must be finite.
struct ScoredSample {
  double score = 0.0;
  bool is_inlier = false;
};

struct MetricsReport {
  double fpr95 = 0.0;
  double auroc = 0.0;
  double aupr = 0.0;
  std::size_t n_in = 0;
  std::size_t n_out = 0;
};

namespace detail {

inline void split_scores(const std::vector<ScoredSample>& samples, std::vector<double>& in,
                         std::vector<double>& out) {
  for (const auto& s : samples) {
    require(is_finite(s.score), "metrics: non-finite score");
    (s.is_inlier ? in : out).push_back(s.score);
  }
  require(!in.empty() && !out.empty(), "metrics: need at least one inlier and one outlier");
}

}  // namespace detail

/// False positive rate at the largest threshold t that still admits at least
/// tpr_target of the inliers, where "admitted" means score >= t. Thresholds
/// are realized score values, no interpolation.
inline double fpr_at_tpr(const std::vector<ScoredSample>& samples, double tpr_target) {
  require(tpr_target > 0.0 && tpr_target <= 1.0, "fpr_at_tpr: tpr_target must be in (0,1]");
  std::vector<double> in, out;
  detail::split_scores(samples, in, out);
  std::sort(in.begin(), in.end(), std::greater<double>());
  const double n_in = static_cast<double>(in.size());
  // Smallest admitted-count k with k/n_in >= target; the same division the
  // scan oracle performs, so the two routes agree bit for bit.
  std::size_t k = in.size();
  for (std::size_t c = 1; c <= in.size(); ++c) {
    if (static_cast<double>(c) / n_in >= tpr_target) {
      k = c;
      break;
    }
  }
  const double threshold = in[k - 1];
  std::size_t fp = 0;
  for (double s : out)
    if (s >= threshold) ++fp;
  return static_cast<double>(fp) / static_cast<double>(out.size());
}

/// Rank statistic P(s_in > s_out) + 0.5 * P(s_in = s_out), computed from
/// average ranks (Mann-Whitney with tie correction).
inline double auroc(const std::vector<ScoredSample>& samples) {
  std::vector<double> in, out;
  detail::split_scores(samples, in, out);

  std::vector<std::pair<double, bool>> all;  // (score, is_inlier)
  all.reserve(samples.size());
  for (double s : in) all.emplace_back(s, true);
  for (double s : out) all.emplace_back(s, false);
  std::sort(all.begin(), all.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });

  double rank_sum_in = 0.0;
  std::size_t i = 0;
  while (i < all.size()) {
    std::size_t j = i;
    while (j < all.size() && all[j].first == all[i].first) ++j;
    // ranks i+1 .. j (1-based) share the average rank
    const double avg_rank = static_cast<double>(i + 1 + j) / 2.0;
    for (std::size_t t = i; t < j; ++t)
      if (all[t].second) rank_sum_in += avg_rank;
    i = j;
  }
  const double n_in = static_cast<double>(in.size());
  const double n_out = static_cast<double>(out.size());
  return (rank_sum_in - n_in * (n_in + 1.0) / 2.0) / (n_in * n_out);
}

/// Average precision with outliers as the positive class; a sample is flagged
/// positive when its score falls at or below the threshold, so thresholds are
/// walked in ascending score order, tie groups admitted at once.
inline double aupr(const std::vector<ScoredSample>& samples) {
  std::vector<double> in, out;
  detail::split_scores(samples, in, out);

  std::vector<std::pair<double, bool>> all;
  all.reserve(samples.size());
  for (double s : in) all.emplace_back(s, true);
  for (double s : out) all.emplace_back(s, false);
  std::sort(all.begin(), all.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });

  const double n_out = static_cast<double>(out.size());
  double ap = 0.0;
  double recall_prev = 0.0;
  std::size_t tp = 0, admitted = 0;
  std::size_t i = 0;
  while (i < all.size()) {
    std::size_t j = i;
    while (j < all.size() && all[j].first == all[i].first) ++j;
    for (std::size_t t = i; t < j; ++t) {
      ++admitted;
      if (!all[t].second) ++tp;
    }
    const double recall = static_cast<double>(tp) / n_out;
    const double precision = static_cast<double>(tp) / static_cast<double>(admitted);
    ap += (recall - recall_prev) * precision;
    recall_prev = recall;
    i = j;
  }
  return ap;
}

inline MetricsReport compute_metrics(const std::vector<ScoredSample>& samples) {
  MetricsReport r;
  r.fpr95 = fpr_at_tpr(samples, 0.95);
  r.auroc = auroc(samples);
  r.aupr = aupr(samples);
  for (const auto& s : samples) (s.is_inlier ? r.n_in : r.n_out) += 1;
  return r;
}

}  // namespace hood
