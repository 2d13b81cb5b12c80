#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <memory>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "hood/common.hpp"
#include "hood/data.hpp"
#include "hood/encoder.hpp"
#include "hood/independence.hpp"
#include "hood/metrics.hpp"
#include "hood/scoring.hpp"
#include "hood/trainer.hpp"

namespace hood {

enum class ScoreKind { Cor, Msp };

inline std::string score_kind_name(ScoreKind s) { return s == ScoreKind::Cor ? "cor" : "msp"; }

inline ScoreKind parse_score_kind(const std::string& s) {
  if (s == "cor") return ScoreKind::Cor;
  if (s == "msp") return ScoreKind::Msp;
  throw ContractViolation("unknown score '" + s + "' (valid options: cor, msp)");
}

enum class SweepParam { None, Lambda, Sigma, DistortN };

inline std::string sweep_param_name(SweepParam p) {
  switch (p) {
    case SweepParam::None: return "none";
    case SweepParam::Lambda: return "lambda";
    case SweepParam::Sigma: return "sigma";
    case SweepParam::DistortN: return "distort_n";
  }
  return "?";
}

inline SweepParam parse_sweep_param(const std::string& s) {
  if (s == "none") return SweepParam::None;
  if (s == "lambda") return SweepParam::Lambda;
  if (s == "sigma") return SweepParam::Sigma;
  if (s == "distort_n") return SweepParam::DistortN;
  throw ContractViolation("unknown sweep param '" + s +
                          "' (valid options: none, lambda, sigma, distort_n)");
}

/// One trained-and-scored entry of a plan: the objective it trains, the test
/// statistic it scores with, and optional per-method twists.
struct MethodSpec {
  std::string name;  // e.g. "hood+cor"
  Objective objective = Objective::Hood;
  ScoreKind score = ScoreKind::Msp;
  bool has_kernel_override = false;
  KernelKind kernel_override = KernelKind::Rbf;
  bool fake_ood = false;  // train on distorted inliers instead of the real pool
};

/// Parse method strings like "hood+cor", "ce_only+msp", "hood:linear+cor",
/// "hood:fake+cor".
inline MethodSpec parse_method(const std::string& text) {
  const auto plus = text.rfind('+');
  require(plus != std::string::npos && plus > 0 && plus + 1 < text.size(),
          "method '" + text + "' must look like <objective>+<score>");
  MethodSpec m;
  m.name = text;
  m.score = parse_score_kind(text.substr(plus + 1));
  std::string obj = text.substr(0, plus);
  const auto colon = obj.find(':');
  if (colon != std::string::npos) {
    const std::string tag = obj.substr(colon + 1);
    obj = obj.substr(0, colon);
    if (tag == "fake") {
      m.fake_ood = true;
    } else {
      m.has_kernel_override = true;
      m.kernel_override = parse_kernel_kind(tag);
    }
  }
  m.objective = parse_objective(obj);
  return m;
}

struct ExperimentPlan {
  BundleConfig bundle;
  TrainConfig train;
  std::vector<MethodSpec> methods;
  std::vector<std::uint64_t> seeds;
  SweepParam sweep_param = SweepParam::None;
  std::vector<double> sweep_values;

  void validate() const {
    bundle.validate();
    train.validate();
    require(!methods.empty(), "ExperimentPlan: need at least one method");
    require(!seeds.empty(), "ExperimentPlan: need at least one seed");
    if (sweep_param == SweepParam::None) {
      require(sweep_values.empty(), "ExperimentPlan: sweep values given without a sweep param");
    } else {
      require(!sweep_values.empty(), "ExperimentPlan: sweep param given without values");
      for (std::size_t i = 1; i < sweep_values.size(); ++i)
        require(sweep_values[i] > sweep_values[i - 1],
                "ExperimentPlan: sweep values must be strictly increasing");
    }
  }
};

struct ResultRow {
  std::string method;
  std::uint64_t seed = 0;
  SweepParam sweep_param = SweepParam::None;
  double sweep_value = 0.0;  // meaningful only when sweep_param != None
  double fpr95 = 0.0;
  double auroc = 0.0;
  double aupr = 0.0;
  double final_hsic = 0.0;
};

struct ResultTable {
  std::vector<ResultRow> rows;
};

/// Score every test sample (inliers then outliers) with the chosen statistic.
inline std::vector<ScoredSample> score_test_set(const EncoderParams& params,
                                                const ClassMeans& means,
                                                const DatasetBundle& bundle, ScoreKind kind) {
  require(bundle.test_in.rows() > 0 && bundle.test_out.rows() > 0,
          "score_test_set: empty test split");
  const Matrix z_in = forward(params, bundle.test_in);
  const Matrix z_out = forward(params, bundle.test_out);
  std::vector<ScoredSample> scored;
  scored.reserve(z_in.rows() + z_out.rows());
  auto score_rows = [&](const Matrix& z, bool is_inlier) {
    for (std::size_t i = 0; i < z.rows(); ++i) {
      const std::vector<double> q = z.row(i);
      const double s = kind == ScoreKind::Cor ? cor_score(means, q) : msp_score(params, q);
      scored.push_back({s, is_inlier});
    }
  };
  score_rows(z_in, true);
  score_rows(z_out, false);
  return scored;
}

/// Held-out dependence between inlier and outlier features, measured with the
/// training kernel on equal-size test prefixes.
inline double held_out_hsic(const EncoderParams& params, const DatasetBundle& bundle,
                            const KernelSpec& kernel) {
  const std::size_t n = std::min(bundle.test_in.rows(), bundle.test_out.rows());
  require(n >= 2, "held_out_hsic: need at least 2 held-out rows per side");
  Matrix zin(n, bundle.test_in.cols()), zout(n, bundle.test_out.cols());
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < bundle.test_in.cols(); ++j) {
      zin(i, j) = bundle.test_in(i, j);
      zout(i, j) = bundle.test_out(i, j);
    }
  return hsic_biased(forward(params, zin), forward(params, zout), kernel).value;
}

namespace detail {

struct TrainedCell {
  EncoderParams params;
  ClassMeans means;
  double final_hsic = 0.0;
};

}  // namespace detail

/// Execute every (sweep value, method, seed) cell: regenerate the bundle,
/// train, score, measure. The bundle seed is derived from the plan's bundle
/// seed and the run seed only, so all methods see identical data for a given
/// seed. Identical training cells (same config, bundle and seed) are trained
/// once and reused across score columns.
inline ResultTable run_plan(const ExperimentPlan& plan) {
  plan.validate();
  ResultTable table;
  std::map<std::string, std::shared_ptr<detail::TrainedCell>> cache;

  const std::size_t n_values =
      plan.sweep_param == SweepParam::None ? 1 : plan.sweep_values.size();
  for (std::size_t vi = 0; vi < n_values; ++vi) {
    for (const MethodSpec& method : plan.methods) {
      for (std::uint64_t seed : plan.seeds) {
        BundleConfig bcfg = plan.bundle;
        bcfg.seed = Rng::mix(plan.bundle.seed, seed);
        TrainConfig tcfg = plan.train;
        tcfg.seed = seed;
        tcfg.objective = method.objective;
        if (method.has_kernel_override) tcfg.kernel.kind = method.kernel_override;
        if (method.fake_ood) bcfg.ood_source = OodSource::Fake;
        if (plan.sweep_param == SweepParam::Lambda) {
          tcfg.lambda = plan.sweep_values[vi];
        } else if (plan.sweep_param == SweepParam::Sigma) {
          tcfg.kernel.sigma = plan.sweep_values[vi];
        } else if (plan.sweep_param == SweepParam::DistortN) {
          // the distortion sweep strengthens augmentation of the real pool
          bcfg.augment.strength_n = static_cast<std::size_t>(plan.sweep_values[vi]);
        }

        const std::string key = bcfg.echo() + "|" + tcfg.echo();
        std::shared_ptr<detail::TrainedCell> cell;
        if (auto it = cache.find(key); it != cache.end()) {
          cell = it->second;
        } else {
          try {
            const DatasetBundle bundle = make_gaussian_bundle(bcfg);
            cell = std::make_shared<detail::TrainedCell>();
            const TrainResult tr = train(tcfg, bundle);
            cell->params = tr.params;
            cell->means =
                class_means(forward(cell->params, bundle.train_in), bundle.train_labels);
            cell->final_hsic = held_out_hsic(cell->params, bundle, tcfg.kernel);
            cache.emplace(key, cell);
          } catch (const NumericFailure& e) {
            throw NumericFailure("method " + method.name + ", seed " + std::to_string(seed) +
                                 ": " + e.what());
          } catch (const ContractViolation& e) {
            throw ContractViolation("method " + method.name + ", seed " + std::to_string(seed) +
                                    ": " + e.what());
          }
        }

        // scoring needs the bundle again; regenerate (cheap and deterministic)
        const DatasetBundle bundle = make_gaussian_bundle(bcfg);
        const std::vector<ScoredSample> scored =
            score_test_set(cell->params, cell->means, bundle, method.score);
        const MetricsReport mr = compute_metrics(scored);
        ResultRow row;
        row.method = method.name;
        row.seed = seed;
        row.sweep_param = plan.sweep_param;
        row.sweep_value = plan.sweep_param == SweepParam::None ? 0.0 : plan.sweep_values[vi];
        row.fpr95 = mr.fpr95;
        row.auroc = mr.auroc;
        row.aupr = mr.aupr;
        row.final_hsic = cell->final_hsic;
        table.rows.push_back(row);
      }
    }
  }
  return table;
}

struct SummaryRow {
  std::string method;
  SweepParam sweep_param = SweepParam::None;
  double sweep_value = 0.0;
  std::size_t n = 0;
  double mean_fpr95 = 0.0, std_fpr95 = 0.0;
  double mean_auroc = 0.0, std_auroc = 0.0;
  double mean_aupr = 0.0, std_aupr = 0.0;
  double mean_final_hsic = 0.0, std_final_hsic = 0.0;
};

/// Aggregate across seeds per (method, sweep value). Population std, so a
/// single seed reports exactly zero spread.
inline std::vector<SummaryRow> sweep_summary(const ResultTable& table) {
  require(!table.rows.empty(), "sweep_summary: empty table");
  const SweepParam param = table.rows.front().sweep_param;
  for (const auto& r : table.rows)
    require(r.sweep_param == param, "sweep_summary: table mixes different sweep params");

  std::map<std::pair<std::string, double>, std::vector<const ResultRow*>> groups;
  std::vector<std::pair<std::string, double>> order;
  for (const auto& r : table.rows) {
    const auto key = std::make_pair(r.method, r.sweep_value);
    if (groups.find(key) == groups.end()) order.push_back(key);
    groups[key].push_back(&r);
  }

  auto mean_std = [](const std::vector<const ResultRow*>& rows, auto field, double& mean,
                     double& sd) {
    mean = 0.0;
    for (const auto* r : rows) mean += r->*field;
    mean /= static_cast<double>(rows.size());
    double var = 0.0;
    for (const auto* r : rows) var += (r->*field - mean) * (r->*field - mean);
    sd = std::sqrt(var / static_cast<double>(rows.size()));
  };

  std::vector<SummaryRow> out;
  for (const auto& key : order) {
    const auto& rows = groups[key];
    SummaryRow s;
    s.method = key.first;
    s.sweep_param = param;
    s.sweep_value = key.second;
    s.n = rows.size();
    mean_std(rows, &ResultRow::fpr95, s.mean_fpr95, s.std_fpr95);
    mean_std(rows, &ResultRow::auroc, s.mean_auroc, s.std_auroc);
    mean_std(rows, &ResultRow::aupr, s.mean_aupr, s.std_aupr);
    mean_std(rows, &ResultRow::final_hsic, s.mean_final_hsic, s.std_final_hsic);
    out.push_back(s);
  }
  return out;
}

inline void write_result_csv(std::ostream& os, const ResultTable& table,
                             const std::string& config_hash) {
  os << "# config-hash: " << config_hash << "\n";
  os << "method,seed,sweep_param,sweep_value,fpr95,auroc,aupr,final_hsic\n";
  for (const auto& r : table.rows) {
    os << r.method << "," << r.seed << ",";
    if (r.sweep_param == SweepParam::None)
      os << ",";
    else
      os << sweep_param_name(r.sweep_param) << "," << hood::detail::format_double(r.sweep_value);
    os << "," << hood::detail::format_double(r.fpr95) << ","
       << hood::detail::format_double(r.auroc) << "," << hood::detail::format_double(r.aupr)
       << "," << hood::detail::format_double(r.final_hsic) << "\n";
  }
}

inline void write_summary(std::ostream& os, const std::vector<SummaryRow>& summary,
                          const std::string& config_hash) {
  os << "# config-hash: " << config_hash << "\n";
  for (const auto& s : summary) {
    os << "method " << s.method;
    if (s.sweep_param != SweepParam::None)
      os << " " << sweep_param_name(s.sweep_param) << "=" << s.sweep_value;
    os << " runs=" << s.n << "\n";
    os << "  fpr95 " << s.mean_fpr95 << " +- " << s.std_fpr95 << "\n";
    os << "  auroc " << s.mean_auroc << " +- " << s.std_auroc << "\n";
    os << "  aupr " << s.mean_aupr << " +- " << s.std_aupr << "\n";
    os << "  final_hsic " << s.mean_final_hsic << " +- " << s.std_final_hsic << "\n";
  }
}

}  // namespace hood
