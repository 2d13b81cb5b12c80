#pragma once

#include <cmath>
#include <cstdint>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "hood/common.hpp"
#include "hood/independence.hpp"
#include "hood/kernels.hpp"
#include "hood/matrix.hpp"
#include "hood/rng.hpp"

namespace hood {

enum class Activation { Relu, Tanh };

inline std::string activation_name(Activation a) {
  return a == Activation::Relu ? "relu" : "tanh";
}

inline Activation parse_activation(const std::string& s) {
  if (s == "relu") return Activation::Relu;
  if (s == "tanh") return Activation::Tanh;
  throw ContractViolation("unknown activation '" + s + "' (expected relu or tanh)");
}

enum class Objective { CeOnly, Hood, OeUniform, Mmd };

inline std::string objective_name(Objective o) {
  switch (o) {
    case Objective::CeOnly: return "ce_only";
    case Objective::Hood: return "hood";
    case Objective::OeUniform: return "oe_uniform";
    case Objective::Mmd: return "mmd";
  }
  return "?";
}

inline Objective parse_objective(const std::string& s) {
  if (s == "ce_only") return Objective::CeOnly;
  if (s == "hood") return Objective::Hood;
  if (s == "oe_uniform") return Objective::OeUniform;
  if (s == "mmd") return Objective::Mmd;
  throw ContractViolation("unknown objective '" + s +
                          "' (expected hood, oe_uniform, mmd or ce_only)");
}

struct DenseLayer {
  Matrix w;                // out x in
  std::vector<double> b;   // out
};

/// MLP feature encoder plus a bias-free softmax classifier on top of the
/// features. The classifier row for class c is the weight vector scored
/// against each feature vector by plain inner product.
struct EncoderParams {
  std::vector<DenseLayer> layers;  // input -> hidden ... -> feature
  Matrix classifier;               // C x d
  Activation activation = Activation::Relu;

  std::size_t input_dim() const { return layers.front().w.cols(); }
  std::size_t feature_dim() const { return layers.back().w.rows(); }
  std::size_t class_count() const { return classifier.rows(); }

  void validate() const {
    require(!layers.empty(), "EncoderParams: no layers");
    for (std::size_t l = 0; l < layers.size(); ++l) {
      require(layers[l].b.size() == layers[l].w.rows(), "EncoderParams: bias length mismatch");
      if (l > 0)
        require(layers[l].w.cols() == layers[l - 1].w.rows(),
                "EncoderParams: layer shapes do not chain");
    }
    require(classifier.rows() >= 2, "EncoderParams: need at least 2 classes");
    require(classifier.cols() == feature_dim(), "EncoderParams: classifier width mismatch");
  }
};

/// Gradient (or momentum buffer) with the same shape as EncoderParams.
struct EncoderGrad {
  std::vector<DenseLayer> layers;
  Matrix classifier;
};

inline EncoderGrad zero_grad_like(const EncoderParams& p) {
  EncoderGrad g;
  g.layers.reserve(p.layers.size());
  for (const auto& l : p.layers)
    g.layers.push_back({Matrix(l.w.rows(), l.w.cols()), std::vector<double>(l.b.size(), 0.0)});
  g.classifier = Matrix(p.classifier.rows(), p.classifier.cols());
  return g;
}

/// Flat view over every scalar parameter, weights and biases in a fixed
/// order. Shared by the SGD update, finite differencing and checkpointing.
struct ParamRef {
  double* value;
  bool is_bias;
};

template <typename ParamsLike>
inline std::vector<ParamRef> param_refs(ParamsLike& p) {
  std::vector<ParamRef> refs;
  for (auto& l : p.layers) {
    for (double& v : l.w.data()) refs.push_back({&v, false});
    for (double& v : l.b) refs.push_back({&v, true});
  }
  for (double& v : p.classifier.data()) refs.push_back({&v, false});
  return refs;
}

struct TrainConfig {
  // architecture
  std::vector<std::size_t> hidden_dims = {64, 64};
  std::size_t feature_dim = 16;
  Activation activation = Activation::Relu;
  // objective
  Objective objective = Objective::Hood;
  double lambda = 1.0;
  KernelSpec kernel;  // sigma defaults to 5.0
  // optimization
  std::size_t epochs = 50;
  double base_lr = 0.01;
  double final_lr = 1e-5;
  double momentum = 0.9;
  double weight_decay = 5e-4;
  std::size_t batch_in = 16;
  std::size_t ratio_out_in = 2;
  std::uint64_t seed = 1;

  void validate() const {
    kernel.validate();
    require(lambda >= 0.0, "TrainConfig: lambda must be >= 0");
    require(batch_in >= 2, "TrainConfig: batch_in must be >= 2");
    require(base_lr > final_lr && final_lr >= 0.0,
            "TrainConfig: need base_lr > final_lr >= 0");
    require(momentum >= 0.0 && momentum < 1.0, "TrainConfig: momentum must be in [0,1)");
    require(weight_decay >= 0.0, "TrainConfig: weight_decay must be >= 0");
    require(feature_dim >= 1, "TrainConfig: feature_dim must be >= 1");
    for (std::size_t h : hidden_dims) require(h >= 1, "TrainConfig: hidden dims must be >= 1");
  }

  /// Canonical key=value echo, shared by config hashing and run caching.
  std::string echo() const;
};

/// One training step's data: labeled inliers plus an unlabeled outlier block
/// of ratio_out_in * batch_in rows.
struct LabeledBatch {
  Matrix x_in;
  std::vector<int> labels;
  Matrix x_out;
};

struct LossBreakdown {
  double total = 0.0;
  double cls = 0.0;
  double dep = 0.0;
};

// ---------------------------------------------------------------------------
// Forward pass
// ---------------------------------------------------------------------------

struct ForwardCache {
  std::vector<Matrix> inputs;  // inputs[l] feeds layer l
  std::vector<Matrix> pre;     // pre[l] = inputs[l] * W_l^T + b_l
};

inline Matrix affine(const Matrix& x, const DenseLayer& layer) {
  Matrix out(x.rows(), layer.w.rows());
  for (std::size_t i = 0; i < x.rows(); ++i)
    for (std::size_t o = 0; o < layer.w.rows(); ++o) {
      double s = layer.b[o];
      for (std::size_t k = 0; k < x.cols(); ++k) s += x(i, k) * layer.w(o, k);
      out(i, o) = s;
    }
  return out;
}

inline double activate(double v, Activation a) {
  return a == Activation::Relu ? (v > 0.0 ? v : 0.0) : std::tanh(v);
}

inline double activate_deriv(double pre, Activation a) {
  if (a == Activation::Relu) return pre > 0.0 ? 1.0 : 0.0;
  const double t = std::tanh(pre);
  return 1.0 - t * t;
}

/// Feature extraction. Hidden layers are followed by the activation; the
/// final (feature) layer stays linear.
inline Matrix forward_cached(const EncoderParams& p, const Matrix& x, ForwardCache& cache) {
  require(x.cols() == p.input_dim(), "forward: input width does not match encoder");
  cache.inputs.clear();
  cache.pre.clear();
  Matrix h = x;
  for (std::size_t l = 0; l < p.layers.size(); ++l) {
    cache.inputs.push_back(h);
    Matrix a = affine(h, p.layers[l]);
    cache.pre.push_back(a);
    if (l + 1 < p.layers.size())
      for (double& v : a.data()) v = activate(v, p.activation);
    h = std::move(a);
  }
  return h;
}

inline Matrix forward(const EncoderParams& p, const Matrix& x) {
  ForwardCache cache;
  return forward_cached(p, x, cache);
}

/// Backpropagate d loss / d features through the cached forward pass,
/// accumulating layer gradients.
inline void backprop_features(const EncoderParams& p, const ForwardCache& cache,
                              const Matrix& dfeatures, EncoderGrad& grad) {
  Matrix delta = dfeatures;  // d loss / d pre[l], starting at the linear output
  for (std::size_t l = p.layers.size(); l-- > 0;) {
    const Matrix& input = cache.inputs[l];
    // dW = delta^T * input, db = column sums of delta
    DenseLayer& gl = grad.layers[l];
    for (std::size_t o = 0; o < delta.cols(); ++o) {
      double db = 0.0;
      for (std::size_t i = 0; i < delta.rows(); ++i) {
        const double d = delta(i, o);
        db += d;
        for (std::size_t k = 0; k < input.cols(); ++k) gl.w(o, k) += d * input(i, k);
      }
      gl.b[o] += db;
    }
    if (l == 0) break;
    // d loss / d input = delta * W, then through the previous activation
    Matrix prev(delta.rows(), input.cols());
    for (std::size_t i = 0; i < delta.rows(); ++i)
      for (std::size_t k = 0; k < input.cols(); ++k) {
        double s = 0.0;
        for (std::size_t o = 0; o < delta.cols(); ++o) s += delta(i, o) * p.layers[l].w(o, k);
        prev(i, k) = s * activate_deriv(cache.pre[l - 1](i, k), p.activation);
      }
    delta = std::move(prev);
  }
}

// ---------------------------------------------------------------------------
// Classifier and losses
// ---------------------------------------------------------------------------

inline Matrix logits_of(const Matrix& classifier, const Matrix& z) {
  require(z.cols() == classifier.cols(), "logits: feature width does not match classifier");
  Matrix logits(z.rows(), classifier.rows());
  for (std::size_t i = 0; i < z.rows(); ++i)
    for (std::size_t c = 0; c < classifier.rows(); ++c) logits(i, c) = row_dot(z, i, classifier, c);
  return logits;
}

/// In-place log-softmax per row, via log-sum-exp.
inline void log_softmax_rows(Matrix& logits) {
  for (std::size_t i = 0; i < logits.rows(); ++i) {
    double mx = logits(i, 0);
    for (std::size_t c = 1; c < logits.cols(); ++c) mx = std::max(mx, logits(i, c));
    double sum = 0.0;
    for (std::size_t c = 0; c < logits.cols(); ++c) sum += std::exp(logits(i, c) - mx);
    const double lse = mx + std::log(sum);
    for (std::size_t c = 0; c < logits.cols(); ++c) logits(i, c) -= lse;
  }
}

inline void check_labels(const std::vector<int>& labels, std::size_t n, std::size_t classes) {
  require(labels.size() == n, "labels: length does not match row count");
  for (int y : labels)
    require(y >= 0 && static_cast<std::size_t>(y) < classes, "labels: class index out of range");
}

/// Mean negative log-likelihood of the labels under the softmax classifier.
inline double cross_entropy_loss(const EncoderParams& p, const Matrix& z,
                                 const std::vector<int>& labels) {
  check_labels(labels, z.rows(), p.class_count());
  Matrix logp = logits_of(p.classifier, z);
  log_softmax_rows(logp);
  double loss = 0.0;
  for (std::size_t i = 0; i < z.rows(); ++i) loss -= logp(i, static_cast<std::size_t>(labels[i]));
  return loss / static_cast<double>(z.rows());
}

/// Cross entropy plus classifier/feature gradients. Returns the loss;
/// accumulates weight * dCE/dW into dclassifier and sets dz.
inline double cross_entropy_with_grad(const EncoderParams& p, const Matrix& z,
                                      const std::vector<int>& labels, double weight,
                                      Matrix& dclassifier, Matrix& dz) {
  check_labels(labels, z.rows(), p.class_count());
  const std::size_t n = z.rows();
  const std::size_t classes = p.class_count();
  Matrix logp = logits_of(p.classifier, z);
  log_softmax_rows(logp);
  double loss = 0.0;
  Matrix dlogits(n, classes);
  const double inv_n = 1.0 / static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) {
    loss -= logp(i, static_cast<std::size_t>(labels[i]));
    for (std::size_t c = 0; c < classes; ++c) {
      double d = std::exp(logp(i, c)) * inv_n;
      if (c == static_cast<std::size_t>(labels[i])) d -= inv_n;
      dlogits(i, c) = d * weight;
    }
  }
  for (std::size_t c = 0; c < classes; ++c)
    for (std::size_t a = 0; a < z.cols(); ++a) {
      double s = 0.0;
      for (std::size_t i = 0; i < n; ++i) s += dlogits(i, c) * z(i, a);
      dclassifier(c, a) += s;
    }
  dz = Matrix(n, z.cols());
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t a = 0; a < z.cols(); ++a) {
      double s = 0.0;
      for (std::size_t c = 0; c < classes; ++c) s += dlogits(i, c) * p.classifier(c, a);
      dz(i, a) = s;
    }
  return loss * inv_n;
}

/// KL(uniform || softmax) averaged over the rows of g; zero when every
/// outlier's logits are already uniform. Optionally produces gradients.
inline double uniform_kl_with_grad(const EncoderParams& p, const Matrix& g, double weight,
                                   Matrix* dclassifier, Matrix* dg) {
  const std::size_t m = g.rows();
  const std::size_t classes = p.class_count();
  const double log_c = std::log(static_cast<double>(classes));
  Matrix logp = logits_of(p.classifier, g);
  log_softmax_rows(logp);
  double dep = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    double mean_logp = 0.0;
    for (std::size_t c = 0; c < classes; ++c) mean_logp += logp(i, c);
    dep += -mean_logp / static_cast<double>(classes) - log_c;
  }
  dep /= static_cast<double>(m);
  if (dclassifier == nullptr) return dep;

  const double inv_m = 1.0 / static_cast<double>(m);
  const double inv_c = 1.0 / static_cast<double>(classes);
  Matrix dlogits(m, classes);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t c = 0; c < classes; ++c)
      dlogits(i, c) = (std::exp(logp(i, c)) - inv_c) * inv_m * weight;
  for (std::size_t c = 0; c < classes; ++c)
    for (std::size_t a = 0; a < g.cols(); ++a) {
      double s = 0.0;
      for (std::size_t i = 0; i < m; ++i) s += dlogits(i, c) * g(i, a);
      (*dclassifier)(c, a) += s;
    }
  *dg = Matrix(m, g.cols());
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t a = 0; a < g.cols(); ++a) {
      double s = 0.0;
      for (std::size_t c = 0; c < classes; ++c) s += dlogits(i, c) * p.classifier(c, a);
      (*dg)(i, a) = s;
    }
  return dep;
}

inline void check_outlier_block(const Matrix& x_in, const Matrix& x_out, std::size_t ratio) {
  require(x_out.rows() == ratio * x_in.rows(),
          "outlier block must hold ratio_out_in * batch_in rows");
}

/// Dependence term of the selected objective, on precomputed features.
/// hood/mmd: the outlier block is split into ratio_out_in groups the size of
/// the inlier batch, each estimate pairs the group with the same inlier
/// features, and the estimates are averaged. oe_uniform: per-sample KL.
/// The mmd baseline separates the two feature distributions, so its term
/// enters negated: minimizing the total maximizes the discrepancy.
inline double dependence_term(Objective objective, const Matrix& z, const Matrix& g,
                              const EncoderParams& p, const KernelSpec& kernel,
                              std::size_t ratio) {
  if (objective == Objective::OeUniform) return uniform_kl_with_grad(p, g, 0.0, nullptr, nullptr);
  const std::size_t n = z.rows();
  double dep = 0.0;
  for (std::size_t r = 0; r < ratio; ++r) {
    Matrix group(n, g.cols());
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t a = 0; a < g.cols(); ++a) group(i, a) = g(r * n + i, a);
    dep += objective == Objective::Mmd ? -mmd_biased(z, group, kernel)
                                       : hsic_biased(z, group, kernel).value;
  }
  return dep / static_cast<double>(ratio);
}

inline LossBreakdown hood_loss(const EncoderParams& p, const Matrix& x_in,
                               const std::vector<int>& labels, const Matrix& x_out,
                               const TrainConfig& cfg) {
  check_outlier_block(x_in, x_out, cfg.ratio_out_in);
  const Matrix z = forward(p, x_in);
  LossBreakdown lb;
  lb.cls = cross_entropy_loss(p, z, labels);
  if (cfg.lambda > 0.0 && cfg.ratio_out_in > 0) {
    const Matrix g = forward(p, x_out);
    lb.dep = dependence_term(Objective::Hood, z, g, p, cfg.kernel, cfg.ratio_out_in);
  }
  lb.total = lb.cls + cfg.lambda * lb.dep;
  return lb;
}

inline LossBreakdown oe_uniform_loss(const EncoderParams& p, const Matrix& x_in,
                                     const std::vector<int>& labels, const Matrix& x_out,
                                     const TrainConfig& cfg) {
  check_outlier_block(x_in, x_out, cfg.ratio_out_in);
  const Matrix z = forward(p, x_in);
  LossBreakdown lb;
  lb.cls = cross_entropy_loss(p, z, labels);
  if (cfg.lambda > 0.0 && cfg.ratio_out_in > 0) {
    const Matrix g = forward(p, x_out);
    lb.dep = uniform_kl_with_grad(p, g, 0.0, nullptr, nullptr);
  }
  lb.total = lb.cls + cfg.lambda * lb.dep;
  return lb;
}

inline LossBreakdown mmd_loss(const EncoderParams& p, const Matrix& x_in,
                              const std::vector<int>& labels, const Matrix& x_out,
                              const TrainConfig& cfg) {
  check_outlier_block(x_in, x_out, cfg.ratio_out_in);
  const Matrix z = forward(p, x_in);
  LossBreakdown lb;
  lb.cls = cross_entropy_loss(p, z, labels);
  if (cfg.lambda > 0.0 && cfg.ratio_out_in > 0) {
    const Matrix g = forward(p, x_out);
    lb.dep = dependence_term(Objective::Mmd, z, g, p, cfg.kernel, cfg.ratio_out_in);
  }
  lb.total = lb.cls + cfg.lambda * lb.dep;
  return lb;
}

inline LossBreakdown evaluate_loss(const EncoderParams& p, const LabeledBatch& batch,
                                   const TrainConfig& cfg) {
  switch (cfg.objective) {
    case Objective::CeOnly: {
      LossBreakdown lb;
      lb.cls = cross_entropy_loss(p, forward(p, batch.x_in), batch.labels);
      lb.total = lb.cls;
      return lb;
    }
    case Objective::Hood: return hood_loss(p, batch.x_in, batch.labels, batch.x_out, cfg);
    case Objective::OeUniform:
      return oe_uniform_loss(p, batch.x_in, batch.labels, batch.x_out, cfg);
    case Objective::Mmd: return mmd_loss(p, batch.x_in, batch.labels, batch.x_out, cfg);
  }
  return {};
}

/// Analytic gradient of the selected objective w.r.t. every parameter,
/// HSIC/MMD terms included (the chain rule runs through both kernel
/// matrices). The dependence path is skipped entirely when it cannot
/// contribute, so a lambda = 0 run does exactly the ce_only arithmetic.
inline LossBreakdown loss_and_gradient(const EncoderParams& p, const LabeledBatch& batch,
                                       const TrainConfig& cfg, EncoderGrad& grad) {
  grad = zero_grad_like(p);
  const bool with_dep = cfg.objective != Objective::CeOnly && cfg.lambda > 0.0 &&
                        cfg.ratio_out_in > 0 && batch.x_out.rows() > 0;
  if (cfg.objective != Objective::CeOnly)
    check_outlier_block(batch.x_in, batch.x_out, cfg.ratio_out_in);

  ForwardCache cache_in;
  const Matrix z = forward_cached(p, batch.x_in, cache_in);
  Matrix dz;
  LossBreakdown lb;
  lb.cls = cross_entropy_with_grad(p, z, batch.labels, 1.0, grad.classifier, dz);

  if (with_dep) {
    ForwardCache cache_out;
    const Matrix g = forward_cached(p, batch.x_out, cache_out);
    Matrix dg(g.rows(), g.cols());
    const std::size_t n = z.rows();
    if (cfg.objective == Objective::OeUniform) {
      lb.dep = uniform_kl_with_grad(p, g, cfg.lambda, &grad.classifier, &dg);
      for (double& v : dg.data()) v *= cfg.lambda;
    } else {
      const bool is_mmd = cfg.objective == Objective::Mmd;
      const double sign = is_mmd ? -1.0 : 1.0;
      const double group_weight = sign * cfg.lambda / static_cast<double>(cfg.ratio_out_in);
      for (std::size_t r = 0; r < cfg.ratio_out_in; ++r) {
        Matrix group(n, g.cols());
        for (std::size_t i = 0; i < n; ++i)
          for (std::size_t a = 0; a < g.cols(); ++a) group(i, a) = g(r * n + i, a);
        Matrix dgroup(n, g.cols());
        const double value =
            is_mmd ? mmd_biased_with_grad(z, group, cfg.kernel, group_weight, dz, dgroup)
                   : hsic_biased_with_grad(z, group, cfg.kernel, group_weight, dz, dgroup);
        lb.dep += sign * value / static_cast<double>(cfg.ratio_out_in);
        for (std::size_t i = 0; i < n; ++i)
          for (std::size_t a = 0; a < g.cols(); ++a) dg(r * n + i, a) += dgroup(i, a);
      }
    }
    backprop_features(p, cache_out, dg, grad);
  }
  backprop_features(p, cache_in, dz, grad);
  lb.total = lb.cls + cfg.lambda * lb.dep;
  return lb;
}

inline EncoderGrad loss_gradient(const EncoderParams& p, const LabeledBatch& batch,
                                 const TrainConfig& cfg) {
  EncoderGrad grad;
  loss_and_gradient(p, batch, cfg, grad);
  return grad;
}

// ---------------------------------------------------------------------------
// Initialization and checkpoints
// ---------------------------------------------------------------------------

inline EncoderParams init_encoder(std::size_t input_dim, std::size_t classes,
                                  const TrainConfig& cfg, std::uint64_t init_seed) {
  Rng rng(init_seed);
  EncoderParams p;
  p.activation = cfg.activation;
  std::vector<std::size_t> dims;
  dims.push_back(input_dim);
  for (std::size_t h : cfg.hidden_dims) dims.push_back(h);
  dims.push_back(cfg.feature_dim);
  for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
    const std::size_t fan_in = dims[l];
    const std::size_t fan_out = dims[l + 1];
    const double scale = cfg.activation == Activation::Relu
                             ? std::sqrt(2.0 / static_cast<double>(fan_in))
                             : std::sqrt(1.0 / static_cast<double>(fan_in));
    DenseLayer layer{Matrix(fan_out, fan_in), std::vector<double>(fan_out, 0.0)};
    for (double& v : layer.w.data()) v = scale * rng.next_gaussian();
    p.layers.push_back(std::move(layer));
  }
  p.classifier = Matrix(classes, cfg.feature_dim);
  const double cls_scale = std::sqrt(1.0 / static_cast<double>(cfg.feature_dim));
  for (double& v : p.classifier.data()) v = cls_scale * rng.next_gaussian();
  p.validate();
  return p;
}

namespace detail {

inline std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline void write_values(std::ostream& os, const std::vector<double>& vals, std::size_t per_line) {
  for (std::size_t i = 0; i < vals.size(); ++i)
    os << format_double(vals[i]) << (((i + 1) % per_line == 0 || i + 1 == vals.size()) ? '\n' : ' ');
}

}  // namespace detail

inline std::string TrainConfig::echo() const {
  std::ostringstream os;
  os << "hidden =";
  for (std::size_t h : hidden_dims) os << " " << h;
  os << "\n";
  os << "feature_dim = " << feature_dim << "\n";
  os << "activation = " << activation_name(activation) << "\n";
  os << "objective = " << objective_name(objective) << "\n";
  os << "lambda = " << detail::format_double(lambda) << "\n";
  os << "kernel = " << kernel_kind_name(kernel.kind) << "\n";
  os << "sigma = " << detail::format_double(kernel.sigma) << "\n";
  os << "imq_c = " << detail::format_double(kernel.imq_c) << "\n";
  os << "epochs = " << epochs << "\n";
  os << "base_lr = " << detail::format_double(base_lr) << "\n";
  os << "final_lr = " << detail::format_double(final_lr) << "\n";
  os << "momentum = " << detail::format_double(momentum) << "\n";
  os << "weight_decay = " << detail::format_double(weight_decay) << "\n";
  os << "batch_in = " << batch_in << "\n";
  os << "ratio_out_in = " << ratio_out_in << "\n";
  os << "seed = " << seed << "\n";
  return os.str();
}

/// Structured-text checkpoint: config echo, layer shapes, row-major weights
/// as decimal floats (17 significant digits, so the round trip is exact) and
/// the training seed.
inline void write_checkpoint(std::ostream& os, const EncoderParams& p, std::uint64_t seed,
                             const std::string& config_hash) {
  os << "hood-checkpoint v1\n";
  os << "# config-hash: " << (config_hash.empty() ? "-" : config_hash) << "\n";
  os << "seed " << seed << "\n";
  os << "activation " << activation_name(p.activation) << "\n";
  os << "layers " << p.layers.size() << "\n";
  for (std::size_t l = 0; l < p.layers.size(); ++l) {
    const auto& layer = p.layers[l];
    os << "layer " << l << " " << layer.w.rows() << " " << layer.w.cols() << "\n";
    detail::write_values(os, layer.w.data(), layer.w.cols());
    detail::write_values(os, layer.b, layer.b.size());
  }
  os << "classifier " << p.classifier.rows() << " " << p.classifier.cols() << "\n";
  detail::write_values(os, p.classifier.data(), p.classifier.cols());
}

struct Checkpoint {
  EncoderParams params;
  std::uint64_t seed = 0;
  std::string config_hash;
};

inline Checkpoint read_checkpoint(std::istream& is) {
  Checkpoint ck;
  std::string line, word;
  require(static_cast<bool>(std::getline(is, line)) && line == "hood-checkpoint v1",
          "checkpoint: bad magic line");
  auto read_values = [&](std::vector<double>& out, std::size_t count) {
    out.resize(count);
    for (std::size_t i = 0; i < count; ++i)
      require(static_cast<bool>(is >> out[i]), "checkpoint: truncated value block");
  };
  require(static_cast<bool>(std::getline(is, line)) && line.rfind("# config-hash: ", 0) == 0,
          "checkpoint: missing config hash line");
  ck.config_hash = line.substr(15);
  std::size_t n_layers = 0;
  require(static_cast<bool>(is >> word >> ck.seed) && word == "seed", "checkpoint: missing seed");
  require(static_cast<bool>(is >> word >> line) && word == "activation",
          "checkpoint: missing activation");
  ck.params.activation = parse_activation(line);
  require(static_cast<bool>(is >> word >> n_layers) && word == "layers",
          "checkpoint: missing layer count");
  for (std::size_t l = 0; l < n_layers; ++l) {
    std::size_t idx = 0, rows = 0, cols = 0;
    require(static_cast<bool>(is >> word >> idx >> rows >> cols) && word == "layer" && idx == l,
            "checkpoint: bad layer header");
    DenseLayer layer{Matrix(rows, cols), {}};
    read_values(layer.w.data(), rows * cols);
    read_values(layer.b, rows);
    ck.params.layers.push_back(std::move(layer));
  }
  std::size_t c = 0, d = 0;
  require(static_cast<bool>(is >> word >> c >> d) && word == "classifier",
          "checkpoint: bad classifier header");
  ck.params.classifier = Matrix(c, d);
  read_values(ck.params.classifier.data(), c * d);
  ck.params.validate();
  return ck;
}

}  // namespace hood
