#pragma once

#include <cstdint>
#include <vector>

#include "hood/common.hpp"
#include "hood/data.hpp"
#include "hood/encoder.hpp"

namespace hood {

/// Cosine decay from base_lr (step 0) to final_lr (last step).
inline double cosine_lr(std::size_t step, std::size_t total_steps, double base_lr,
                        double final_lr) {
  if (total_steps <= 1) return base_lr;
  const double t = static_cast<double>(step) / static_cast<double>(total_steps - 1);
  constexpr double kPi = 3.141592653589793238462643383279502884;
  return final_lr + 0.5 * (base_lr - final_lr) * (1.0 + std::cos(kPi * t));
}

/// One SGD step with Nesterov momentum. Weight decay is plain L2 coupling on
/// weights only; biases are excluded.
inline void sgd_nesterov_step(EncoderParams& params, EncoderGrad& grad, EncoderGrad& momentum,
                              double lr, double mu, double weight_decay) {
  const auto p_refs = param_refs(params);
  const auto g_refs = param_refs(grad);
  const auto m_refs = param_refs(momentum);
  for (std::size_t i = 0; i < p_refs.size(); ++i) {
    double g = *g_refs[i].value;
    if (!p_refs[i].is_bias) g += weight_decay * *p_refs[i].value;
    double& buf = *m_refs[i].value;
    buf = mu * buf + g;
    *p_refs[i].value -= lr * (g + mu * buf);
  }
}

struct TrainResult {
  EncoderParams params;
  std::vector<LossBreakdown> history;  // per-epoch means
  std::uint64_t seed = 0;
};

/// Full training run: seeded init, fixed per-epoch outlier groups, cosine lr,
/// Nesterov SGD. Deterministic given the config seed; inlier batching uses
/// its own stream so runs that skip outliers see identical inlier batches.
inline TrainResult train(const TrainConfig& cfg, const DatasetBundle& bundle) {
  cfg.validate();
  require(bundle.train_in.rows() > 0, "train: empty dataset");
  require(bundle.train_in.rows() >= cfg.batch_in, "train: batch_in exceeds training set");
  const std::size_t classes = bundle.class_count();
  require(classes >= 2, "train: need at least 2 classes");

  TrainResult result;
  result.seed = cfg.seed;
  result.params =
      init_encoder(bundle.train_in.cols(), classes, cfg, Rng::mix(cfg.seed, 0x696e6974ULL));

  const std::size_t steps_per_epoch = bundle.train_in.rows() / cfg.batch_in;
  const std::size_t total_steps = cfg.epochs * steps_per_epoch;

  std::vector<std::vector<std::size_t>> groups;
  if (cfg.ratio_out_in > 0 && cfg.epochs > 0) {
    const std::size_t per_epoch = steps_per_epoch * cfg.ratio_out_in * cfg.batch_in;
    groups = fixed_outlier_epochs(bundle.train_out, cfg.epochs, per_epoch,
                                  Rng::mix(cfg.seed, 0x67727570ULL));
  }

  Rng rng_in_order(Rng::mix(cfg.seed, 0x696e6f72ULL));
  Rng rng_out_order(Rng::mix(cfg.seed, 0x6f75746fULL));
  EncoderGrad grad = zero_grad_like(result.params);
  EncoderGrad momentum = zero_grad_like(result.params);
  static const std::vector<std::size_t> kNoGroup;

  std::size_t step = 0;
  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    EpochSampler sampler(bundle, groups.empty() ? kNoGroup : groups[epoch], cfg, rng_in_order,
                         rng_out_order);
    LossBreakdown epoch_mean;
    for (std::size_t s = 0; s < steps_per_epoch; ++s, ++step) {
      const LabeledBatch batch = sampler.next_batch();
      const LossBreakdown lb = loss_and_gradient(result.params, batch, cfg, grad);
      if (!is_finite(lb.total))
        throw NumericFailure("train: non-finite loss at epoch " + std::to_string(epoch));
      const double lr = cosine_lr(step, total_steps, cfg.base_lr, cfg.final_lr);
      sgd_nesterov_step(result.params, grad, momentum, lr, cfg.momentum, cfg.weight_decay);
      epoch_mean.total += lb.total;
      epoch_mean.cls += lb.cls;
      epoch_mean.dep += lb.dep;
    }
    const double inv = 1.0 / static_cast<double>(steps_per_epoch);
    epoch_mean.total *= inv;
    epoch_mean.cls *= inv;
    epoch_mean.dep *= inv;
    result.history.push_back(epoch_mean);
  }
  return result;
}

}  // namespace hood
