#pragma once

#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "hood/common.hpp"
#include "hood/encoder.hpp"
#include "hood/matrix.hpp"
#include "hood/rng.hpp"

namespace hood {

/// One application is a round of additive noise, an optional coordinate
/// shuffle and a multiplicative jitter, repeated strength_n times per row.
struct DistortConfig {
  double noise_scale = 3.0;   // additive gaussian std, in input units
  bool permute = true;        // shuffle coordinates each round
  double scale_jitter = 0.5;  // factor drawn from [1 - j, 1 + j]
  std::size_t strength_n = 5; // rounds per row; 0 leaves rows untouched

  void validate() const {
    require(noise_scale >= 0.0, "DistortConfig: noise_scale must be >= 0");
    require(scale_jitter >= 0.0 && scale_jitter < 1.0,
            "DistortConfig: scale_jitter must be in [0,1)");
  }
};

enum class OodSource { Clusters, Fake };

inline std::string ood_source_name(OodSource s) {
  return s == OodSource::Clusters ? "clusters" : "fake";
}

inline OodSource parse_ood_source(const std::string& s) {
  if (s == "clusters") return OodSource::Clusters;
  if (s == "fake") return OodSource::Fake;
  throw ContractViolation("unknown ood_source '" + s + "' (expected clusters or fake)");
}

/// Generator settings for the synthetic gaussian benchmark: labeled inlier
/// classes with means on a sphere, plus separate training- and test-outlier
/// cluster sets so the two pools never overlap.
struct BundleConfig {
  std::size_t classes = 4;
  std::size_t dim = 8;
  std::size_t n_per_class = 250;       // training inliers per class
  std::size_t n_test_per_class = 125;  // test inliers per class
  std::size_t test_ratio_in_out = 5;   // n_test_in : n_test_out
  double inlier_radius = 3.0;
  double cluster_std = 0.9;
  double min_separation = 2.5;  // floor on distances between cluster means
  double ood_std = 0.9;         // test outlier clusters
  double train_ood_std = 1.8;   // training pool is broader than any test cluster
  std::size_t train_ood_clusters = 3;
  std::size_t test_ood_clusters = 3;
  std::size_t n_train_out = 100000;  // training outlier pool size
  OodSource ood_source = OodSource::Clusters;
  DistortConfig fake;           // fake-outlier generator (ood_source = fake)
  DistortConfig augment{1.0, true, 0.25, 0};  // distortion of the real pool
  std::uint64_t seed = 7;

  void validate() const {
    require(classes >= 2, "BundleConfig: classes must be >= 2");
    require(dim >= 1, "BundleConfig: dim must be >= 1");
    require(n_per_class >= 1, "BundleConfig: n_per_class must be >= 1");
    require(n_test_per_class >= 1, "BundleConfig: n_test_per_class must be >= 1");
    require(test_ratio_in_out >= 1, "BundleConfig: test_ratio_in_out must be >= 1");
    require(classes * n_test_per_class % test_ratio_in_out == 0,
            "BundleConfig: test inlier count must be divisible by test_ratio_in_out");
    require(inlier_radius > 0.0, "BundleConfig: inlier_radius must be positive");
    require(cluster_std > 0.0 && ood_std > 0.0 && train_ood_std > 0.0,
            "BundleConfig: stds must be positive");
    require(min_separation > 0.0, "BundleConfig: min_separation must be positive");
    require(train_ood_clusters >= 1 && test_ood_clusters >= 1,
            "BundleConfig: need at least one OOD cluster per split");
    require(n_train_out >= 1, "BundleConfig: n_train_out must be >= 1");
    fake.validate();
    augment.validate();
  }

  /// Canonical key=value echo; serialized with bundles and hashed into file
  /// headers.
  std::string echo() const;
};

struct DatasetBundle {
  Matrix train_in;
  std::vector<int> train_labels;
  Matrix train_out;  // unlabeled pool
  Matrix test_in;
  std::vector<int> test_labels;
  Matrix test_out;
  std::string meta;  // generator config echo

  std::size_t class_count() const {
    int mx = -1;
    for (int y : train_labels) mx = std::max(mx, y);
    return static_cast<std::size_t>(mx + 1);
  }
};

/// strength_n rounds of additive noise, optional coordinate shuffle and
/// multiplicative jitter, each row independently. Shape preserved.
inline Matrix distort(const Matrix& x, const DistortConfig& cfg, Rng& rng) {
  cfg.validate();
  Matrix out = x;
  const std::size_t d = x.cols();
  std::vector<double> tmp(d);
  for (std::size_t i = 0; i < x.rows(); ++i) {
    double* row = out.row_ptr(i);
    for (std::size_t round = 0; round < cfg.strength_n; ++round) {
      for (std::size_t j = 0; j < d; ++j) row[j] += cfg.noise_scale * rng.next_gaussian();
      if (cfg.permute) {
        const std::vector<std::size_t> pi = rng.permutation(d);
        for (std::size_t j = 0; j < d; ++j) tmp[j] = row[pi[j]];
        for (std::size_t j = 0; j < d; ++j) row[j] = tmp[j];
      }
      const double factor = 1.0 - cfg.scale_jitter + 2.0 * cfg.scale_jitter * rng.next_unit();
      for (std::size_t j = 0; j < d; ++j) row[j] *= factor;
    }
  }
  return out;
}

namespace detail {

inline bool separated(const std::vector<double>& v,
                      const std::vector<std::vector<double>>& existing, double min_separation) {
  for (const auto& e : existing) {
    double dist2 = 0.0;
    for (std::size_t j = 0; j < v.size(); ++j) dist2 += (v[j] - e[j]) * (v[j] - e[j]);
    if (dist2 < min_separation * min_separation) return false;
  }
  return true;
}

inline std::vector<double> random_direction(Rng& rng, std::size_t dim) {
  for (;;) {
    std::vector<double> v(dim);
    double norm = 0.0;
    for (double& c : v) {
      c = rng.next_gaussian();
      norm += c * c;
    }
    norm = std::sqrt(norm);
    if (norm < 1e-12) continue;
    for (double& c : v) c /= norm;
    return v;
  }
}

inline std::vector<double> place_mean(Rng& rng, std::size_t dim, double radius,
                                      const std::vector<std::vector<double>>& existing,
                                      double min_separation, const char* what) {
  for (int attempt = 0; attempt < 1000; ++attempt) {
    std::vector<double> v = random_direction(rng, dim);
    for (double& c : v) c *= radius;
    if (separated(v, existing, min_separation)) return v;
  }
  throw ContractViolation(std::string("make_gaussian_bundle: could not place ") + what +
                          " means above the separation floor; lower min_separation or the "
                          "cluster counts");
}

/// Test-outlier means sit one separation ring away from a training-outlier
/// anchor: disjoint clusters of the same kind, so detection has to transfer
/// rather than memorize.
inline std::vector<double> place_anchored_mean(Rng& rng, const std::vector<double>& anchor,
                                               const std::vector<std::vector<double>>& existing,
                                               double min_separation, const char* what) {
  const std::size_t dim = anchor.size();
  for (int attempt = 0; attempt < 1000; ++attempt) {
    const std::vector<double> dir = random_direction(rng, dim);
    const double dist = min_separation * (1.0 + 0.5 * rng.next_unit());
    std::vector<double> v(dim);
    for (std::size_t j = 0; j < dim; ++j) v[j] = anchor[j] + dist * dir[j];
    if (separated(v, existing, min_separation)) return v;
  }
  throw ContractViolation(std::string("make_gaussian_bundle: could not place ") + what +
                          " means above the separation floor; lower min_separation or the "
                          "cluster counts");
}

}  // namespace detail

inline DatasetBundle make_gaussian_bundle(const BundleConfig& cfg) {
  cfg.validate();
  DatasetBundle bundle;
  bundle.meta = cfg.echo();

  // Inlier class means on a sphere; outlier clusters one separation ring off
  // an inlier class (training OOD) or off a training-OOD cluster (test OOD).
  // Near-manifold outliers keep the task hard, and the test clusters are of
  // the same kind as the training ones without sharing any samples.
  Rng rng_means(Rng::mix(cfg.seed, 0x6d65616eULL));
  std::vector<std::vector<double>> inlier_means;
  for (std::size_t c = 0; c < cfg.classes; ++c)
    inlier_means.push_back(detail::place_mean(rng_means, cfg.dim, cfg.inlier_radius,
                                              inlier_means, cfg.min_separation, "inlier"));
  std::vector<std::vector<double>> all_means = inlier_means;
  std::vector<std::vector<double>> train_ood_means, test_ood_means;
  for (std::size_t c = 0; c < cfg.train_ood_clusters; ++c) {
    auto m = detail::place_anchored_mean(rng_means, inlier_means[c % inlier_means.size()],
                                         all_means, cfg.min_separation, "training OOD");
    train_ood_means.push_back(m);
    all_means.push_back(std::move(m));
  }
  for (std::size_t c = 0; c < cfg.test_ood_clusters; ++c) {
    auto m = detail::place_anchored_mean(rng_means, train_ood_means[c % train_ood_means.size()],
                                         all_means, cfg.min_separation, "test OOD");
    test_ood_means.push_back(m);
    all_means.push_back(std::move(m));
  }

  Rng rng_data(Rng::mix(cfg.seed, 0x64617461ULL));
  auto stack_classes = [&](std::size_t per_class, Matrix& x, std::vector<int>& labels) {
    x = Matrix(cfg.classes * per_class, cfg.dim);
    labels.resize(cfg.classes * per_class);
    std::size_t row = 0;
    for (std::size_t c = 0; c < cfg.classes; ++c) {
      for (std::size_t i = 0; i < per_class; ++i, ++row) {
        labels[row] = static_cast<int>(c);
        for (std::size_t j = 0; j < cfg.dim; ++j)
          x(row, j) = inlier_means[c][j] + cfg.cluster_std * rng_data.next_gaussian();
      }
    }
  };
  stack_classes(cfg.n_per_class, bundle.train_in, bundle.train_labels);
  stack_classes(cfg.n_test_per_class, bundle.test_in, bundle.test_labels);

  auto fill_ood = [&](std::size_t rows, const std::vector<std::vector<double>>& means,
                      double std_dev) {
    Matrix x(rows, cfg.dim);
    for (std::size_t i = 0; i < rows; ++i) {
      const auto& mu = means[i % means.size()];
      for (std::size_t j = 0; j < cfg.dim; ++j)
        x(i, j) = mu[j] + std_dev * rng_data.next_gaussian();
    }
    return x;
  };

  if (cfg.ood_source == OodSource::Fake) {
    // training outliers manufactured from inliers; no real pool is touched
    Matrix base(cfg.n_train_out, cfg.dim);
    for (std::size_t i = 0; i < cfg.n_train_out; ++i)
      for (std::size_t j = 0; j < cfg.dim; ++j)
        base(i, j) = bundle.train_in(i % bundle.train_in.rows(), j);
    Rng rng_fake(Rng::mix(cfg.seed, 0x66616b65ULL));
    bundle.train_out = distort(base, cfg.fake, rng_fake);
  } else {
    bundle.train_out = fill_ood(cfg.n_train_out, train_ood_means, cfg.train_ood_std);
    if (cfg.augment.strength_n > 0) {
      Rng rng_aug(Rng::mix(cfg.seed, 0x61756720ULL));
      bundle.train_out = distort(bundle.train_out, cfg.augment, rng_aug);
    }
  }
  const std::size_t n_test_out = cfg.classes * cfg.n_test_per_class / cfg.test_ratio_in_out;
  bundle.test_out = fill_ood(n_test_out, test_ood_means, cfg.ood_std);
  return bundle;
}

/// n disjoint index groups drawn uniformly from the pool; epoch e trains with
/// group e, so every run over the same pool and seed sees the same outliers.
inline std::vector<std::vector<std::size_t>> fixed_outlier_epochs(const Matrix& pool,
                                                                  std::size_t epochs,
                                                                  std::size_t per_epoch,
                                                                  std::uint64_t seed) {
  require(epochs * per_epoch <= pool.rows(),
          "fixed_outlier_epochs: pool too small for the requested epoch groups");
  Rng rng(seed);
  const std::vector<std::size_t> perm = rng.permutation(pool.rows());
  std::vector<std::vector<std::size_t>> groups(epochs);
  for (std::size_t e = 0; e < epochs; ++e)
    groups[e].assign(perm.begin() + static_cast<std::ptrdiff_t>(e * per_epoch),
                     perm.begin() + static_cast<std::ptrdiff_t>((e + 1) * per_epoch));
  return groups;
}

/// Walks one epoch's batches: batch_in labeled inliers plus
/// ratio_out_in * batch_in outliers from this epoch's group, both sampled
/// without replacement within the epoch. Separate order streams keep the
/// inlier sequence identical whether or not outliers are drawn.
class EpochSampler {
 public:
  EpochSampler(const DatasetBundle& bundle, const std::vector<std::size_t>& outlier_group,
               const TrainConfig& cfg, Rng& rng_in_order, Rng& rng_out_order)
      : bundle_(bundle), cfg_(cfg) {
    require(bundle.train_in.rows() >= cfg.batch_in,
            "EpochSampler: fewer training inliers than batch_in");
    in_order_ = rng_in_order.permutation(bundle.train_in.rows());
    if (cfg.ratio_out_in > 0) {
      out_order_ = outlier_group;
      rng_out_order.shuffle(out_order_);
    }
  }

  std::size_t steps() const { return bundle_.train_in.rows() / cfg_.batch_in; }

  LabeledBatch next_batch() {
    const std::size_t n = cfg_.batch_in;
    const std::size_t m = cfg_.ratio_out_in * n;
    require(in_pos_ + n <= in_order_.size(), "EpochSampler: inliers exhausted for this epoch");
    require(out_pos_ + m <= out_order_.size() || m == 0,
            "EpochSampler: outlier group exhausted for this epoch");
    LabeledBatch batch;
    batch.x_in = Matrix(n, bundle_.train_in.cols());
    batch.labels.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t src = in_order_[in_pos_ + i];
      batch.labels[i] = bundle_.train_labels[src];
      for (std::size_t j = 0; j < bundle_.train_in.cols(); ++j)
        batch.x_in(i, j) = bundle_.train_in(src, j);
    }
    in_pos_ += n;
    batch.x_out = Matrix(m, bundle_.train_out.cols());
    for (std::size_t i = 0; i < m; ++i) {
      const std::size_t src = out_order_[out_pos_ + i];
      for (std::size_t j = 0; j < bundle_.train_out.cols(); ++j)
        batch.x_out(i, j) = bundle_.train_out(src, j);
    }
    out_pos_ += m;
    return batch;
  }

 private:
  const DatasetBundle& bundle_;
  const TrainConfig& cfg_;
  std::vector<std::size_t> in_order_;
  std::vector<std::size_t> out_order_;
  std::size_t in_pos_ = 0;
  std::size_t out_pos_ = 0;
};

// ---------------------------------------------------------------------------
// Serialization: structured-text header plus one CSV block per split, label
// column first for the inlier splits. Values carry 17 significant digits, so
// load/save round trips are byte-identical.
// ---------------------------------------------------------------------------

inline std::string BundleConfig::echo() const {
  std::ostringstream os;
  os << "classes = " << classes << "\n";
  os << "dim = " << dim << "\n";
  os << "n_per_class = " << n_per_class << "\n";
  os << "n_test_per_class = " << n_test_per_class << "\n";
  os << "test_ratio_in_out = " << test_ratio_in_out << "\n";
  os << "inlier_radius = " << detail::format_double(inlier_radius) << "\n";
  os << "cluster_std = " << detail::format_double(cluster_std) << "\n";
  os << "min_separation = " << detail::format_double(min_separation) << "\n";
  os << "ood_std = " << detail::format_double(ood_std) << "\n";
  os << "train_ood_std = " << detail::format_double(train_ood_std) << "\n";
  os << "train_ood_clusters = " << train_ood_clusters << "\n";
  os << "test_ood_clusters = " << test_ood_clusters << "\n";
  os << "n_train_out = " << n_train_out << "\n";
  os << "ood_source = " << ood_source_name(ood_source) << "\n";
  os << "fake.noise_scale = " << detail::format_double(fake.noise_scale) << "\n";
  os << "fake.permute = " << (fake.permute ? "true" : "false") << "\n";
  os << "fake.scale_jitter = " << detail::format_double(fake.scale_jitter) << "\n";
  os << "fake.strength_n = " << fake.strength_n << "\n";
  os << "augment.noise_scale = " << detail::format_double(augment.noise_scale) << "\n";
  os << "augment.permute = " << (augment.permute ? "true" : "false") << "\n";
  os << "augment.scale_jitter = " << detail::format_double(augment.scale_jitter) << "\n";
  os << "augment.strength_n = " << augment.strength_n << "\n";
  os << "seed = " << seed << "\n";
  return os.str();
}

inline void write_bundle(std::ostream& os, const DatasetBundle& bundle) {
  os << "hood-bundle v1\n";
  os << "# config-hash: " << fnv1a_hex(bundle.meta) << "\n";
  os << "meta-begin\n" << bundle.meta << "meta-end\n";
  auto write_block = [&os](const char* name, const Matrix& x, const std::vector<int>* labels) {
    os << name << " " << x.rows() << " " << x.cols() << "\n";
    for (std::size_t i = 0; i < x.rows(); ++i) {
      if (labels) os << (*labels)[i] << ",";
      for (std::size_t j = 0; j < x.cols(); ++j)
        os << detail::format_double(x(i, j)) << (j + 1 == x.cols() ? '\n' : ',');
    }
  };
  write_block("train_in", bundle.train_in, &bundle.train_labels);
  write_block("train_out", bundle.train_out, nullptr);
  write_block("test_in", bundle.test_in, &bundle.test_labels);
  write_block("test_out", bundle.test_out, nullptr);
}

inline DatasetBundle read_bundle(std::istream& is) {
  DatasetBundle bundle;
  std::string line;
  require(static_cast<bool>(std::getline(is, line)) && line == "hood-bundle v1",
          "bundle: bad magic line");
  require(static_cast<bool>(std::getline(is, line)) && line.rfind("# config-hash: ", 0) == 0,
          "bundle: missing config hash");
  require(static_cast<bool>(std::getline(is, line)) && line == "meta-begin",
          "bundle: missing meta block");
  std::ostringstream meta;
  for (;;) {
    require(static_cast<bool>(std::getline(is, line)), "bundle: unterminated meta block");
    if (line == "meta-end") break;
    meta << line << "\n";
  }
  bundle.meta = meta.str();
  auto read_block = [&is, &line](const char* name, Matrix& x, std::vector<int>* labels) {
    std::size_t rows = 0, cols = 0;
    std::string word;
    std::istringstream header;
    require(static_cast<bool>(std::getline(is, line)), "bundle: missing block header");
    header.str(line);
    require(static_cast<bool>(header >> word >> rows >> cols) && word == name,
            std::string("bundle: expected block ") + name);
    x = Matrix(rows, cols);
    if (labels) labels->resize(rows);
    for (std::size_t i = 0; i < rows; ++i) {
      require(static_cast<bool>(std::getline(is, line)), "bundle: truncated block");
      std::istringstream row(line);
      std::string cell;
      if (labels) {
        require(static_cast<bool>(std::getline(row, cell, ',')), "bundle: missing label cell");
        (*labels)[i] = std::stoi(cell);
      }
      for (std::size_t j = 0; j < cols; ++j) {
        require(static_cast<bool>(std::getline(row, cell, ',')), "bundle: short row");
        x(i, j) = std::strtod(cell.c_str(), nullptr);
      }
    }
  };
  read_block("train_in", bundle.train_in, &bundle.train_labels);
  read_block("train_out", bundle.train_out, nullptr);
  read_block("test_in", bundle.test_in, &bundle.test_labels);
  read_block("test_out", bundle.test_out, nullptr);
  return bundle;
}

}  // namespace hood
