#pragma once

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "hood/config.hpp"
#include "hood/data.hpp"
#include "hood/encoder.hpp"
#include "hood/experiment.hpp"
#include "hood/metrics.hpp"
#include "hood/scoring.hpp"
#include "hood/trainer.hpp"

namespace hood::cli {

// Exit codes: 0 success, 2 config error, 3 data error, 4 numeric failure.
constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitData = 3;
constexpr int kExitNumeric = 4;

inline void print_usage(std::ostream& os) {
  os << "Usage: hood <command> [options]\n"
        "\n"
        "Commands:\n"
        "  gen-data --out FILE [--config FILE] [--set key=value]...\n"
        "      generate a dataset bundle\n"
        "  train --bundle FILE --out CKPT [--log FILE] [--config FILE] [--set key=value]...\n"
        "      train an encoder on a bundle; writes checkpoint and per-epoch loss CSV\n"
        "  eval --checkpoint CKPT --bundle FILE --score cor|msp --out FILE\n"
        "      score the bundle's test split; writes metrics CSV plus <out>.scores.csv\n"
        "  sweep --out-dir DIR [--config FILE] [--set key=value]...\n"
        "      run the configured experiment plan; writes results.csv and summary.txt\n";
}

namespace detail_cli {

inline std::ofstream open_out(const std::string& path) {
  std::ofstream os(path);
  if (!os) throw DataError("cannot open output file '" + path + "'");
  return os;
}

inline DatasetBundle load_bundle_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw DataError("cannot open bundle file '" + path + "'");
  try {
    return read_bundle(is);
  } catch (const ContractViolation& e) {
    throw DataError(std::string("bundle file '") + path + "': " + e.what());
  }
}

inline Checkpoint load_checkpoint_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw DataError("cannot open checkpoint file '" + path + "'");
  try {
    return read_checkpoint(is);
  } catch (const ContractViolation& e) {
    throw DataError(std::string("checkpoint file '") + path + "': " + e.what());
  }
}

}  // namespace detail_cli

inline int cmd_gen_data(const CliConfig& cfg, const std::string& out_path) {
  const DatasetBundle bundle = make_gaussian_bundle(cfg.data);
  auto os = detail_cli::open_out(out_path);
  write_bundle(os, bundle);
  std::cout << "bundle written to " << out_path << "\n"
            << "  train_in  " << bundle.train_in.rows() << " x " << bundle.train_in.cols()
            << " (" << bundle.class_count() << " classes)\n"
            << "  train_out " << bundle.train_out.rows() << " x " << bundle.train_out.cols()
            << "\n"
            << "  test_in   " << bundle.test_in.rows() << " x " << bundle.test_in.cols() << "\n"
            << "  test_out  " << bundle.test_out.rows() << " x " << bundle.test_out.cols()
            << "\n";
  return kExitOk;
}

inline int cmd_train(const CliConfig& cfg, const std::string& bundle_path,
                     const std::string& ckpt_path, const std::string& log_path) {
  const DatasetBundle bundle = detail_cli::load_bundle_file(bundle_path);
  const TrainResult result = train(cfg.train, bundle);
  {
    auto os = detail_cli::open_out(ckpt_path);
    write_checkpoint(os, result.params, result.seed, cfg.hash());
  }
  {
    auto os = detail_cli::open_out(log_path);
    os << "# config-hash: " << cfg.hash() << "\n";
    os << "epoch,total,cls,dep\n";
    for (std::size_t e = 0; e < result.history.size(); ++e)
      os << e << "," << hood::detail::format_double(result.history[e].total) << ","
         << hood::detail::format_double(result.history[e].cls) << ","
         << hood::detail::format_double(result.history[e].dep) << "\n";
  }
  std::cout << "checkpoint written to " << ckpt_path << " (" << result.history.size()
            << " epochs logged to " << log_path << ")\n";
  return kExitOk;
}

inline int cmd_eval(const std::string& ckpt_path, const std::string& bundle_path,
                    const std::string& score_name, const std::string& out_path) {
  ScoreKind kind;
  try {
    kind = parse_score_kind(score_name);
  } catch (const ContractViolation& e) {
    throw ConfigError(e.what());
  }
  const Checkpoint ck = detail_cli::load_checkpoint_file(ckpt_path);
  const DatasetBundle bundle = detail_cli::load_bundle_file(bundle_path);
  require(bundle.train_in.cols() == ck.params.input_dim(),
          "eval: bundle input width does not match the checkpoint");

  const ClassMeans means =
      class_means(forward(ck.params, bundle.train_in), bundle.train_labels);
  const std::vector<ScoredSample> scored = score_test_set(ck.params, means, bundle, kind);
  const MetricsReport mr = compute_metrics(scored);

  const std::string run_hash =
      fnv1a_hex(ck.config_hash + "|" + fnv1a_hex(bundle.meta) + "|" + score_name);
  {
    auto os = detail_cli::open_out(out_path);
    os << "# config-hash: " << run_hash << "\n";
    os << "score,fpr95,auroc,aupr,n_in,n_out\n";
    os << score_name << "," << hood::detail::format_double(mr.fpr95) << ","
       << hood::detail::format_double(mr.auroc) << "," << hood::detail::format_double(mr.aupr)
       << "," << mr.n_in << "," << mr.n_out << "\n";
  }
  {
    auto os = detail_cli::open_out(out_path + ".scores.csv");
    os << "# config-hash: " << run_hash << "\n";
    os << "index,score,is_inlier\n";
    for (std::size_t i = 0; i < scored.size(); ++i)
      os << i << "," << hood::detail::format_double(scored[i].score) << ","
         << (scored[i].is_inlier ? 1 : 0) << "\n";
  }
  std::cout << score_name << ": fpr95=" << mr.fpr95 << " auroc=" << mr.auroc
            << " aupr=" << mr.aupr << "\n";
  return kExitOk;
}

inline int cmd_sweep(const CliConfig& cfg, const std::string& out_dir) {
  ExperimentPlan plan;
  try {
    plan = cfg.plan();
  } catch (const ContractViolation& e) {
    throw ConfigError(e.what());
  }
  const ResultTable table = run_plan(plan);
  const std::vector<SummaryRow> summary = sweep_summary(table);
  std::filesystem::create_directories(out_dir);
  {
    auto os = detail_cli::open_out(out_dir + "/results.csv");
    write_result_csv(os, table, cfg.hash());
  }
  {
    auto os = detail_cli::open_out(out_dir + "/summary.txt");
    write_summary(os, summary, cfg.hash());
  }
  std::cout << table.rows.size() << " result rows written to " << out_dir << "/results.csv\n";
  for (const auto& s : summary) {
    std::cout << s.method;
    if (s.sweep_param != SweepParam::None)
      std::cout << " " << sweep_param_name(s.sweep_param) << "=" << s.sweep_value;
    std::cout << ": auroc " << s.mean_auroc << " +- " << s.std_auroc << ", fpr95 "
              << s.mean_fpr95 << ", aupr " << s.mean_aupr << "\n";
  }
  return kExitOk;
}

/// Parse argv and dispatch; all failures are mapped to the documented exit
/// codes with a message on stderr.
inline int main_entry(const std::vector<std::string>& args) {
  try {
    if (args.empty() || args[0] == "--help" || args[0] == "-h") {
      print_usage(args.empty() ? std::cerr : std::cout);
      return args.empty() ? kExitConfig : kExitOk;
    }
    const std::string command = args[0];
    std::string config_path, out_path, bundle_path, ckpt_path, log_path, score_name, out_dir;
    std::vector<std::string> overrides;
    for (std::size_t i = 1; i < args.size(); ++i) {
      const std::string& a = args[i];
      auto next = [&]() -> const std::string& {
        if (i + 1 >= args.size()) throw ConfigError("missing value after " + a);
        return args[++i];
      };
      if (a == "--config") config_path = next();
      else if (a == "--set") overrides.push_back(next());
      else if (a == "--out") out_path = next();
      else if (a == "--bundle") bundle_path = next();
      else if (a == "--checkpoint") ckpt_path = next();
      else if (a == "--log") log_path = next();
      else if (a == "--score") score_name = next();
      else if (a == "--out-dir") out_dir = next();
      else throw ConfigError("unknown option '" + a + "'");
    }

    if (command == "gen-data") {
      if (out_path.empty()) throw ConfigError("gen-data requires --out");
      return cmd_gen_data(load_cli_config(config_path, overrides), out_path);
    }
    if (command == "train") {
      if (bundle_path.empty() || out_path.empty())
        throw ConfigError("train requires --bundle and --out");
      if (log_path.empty()) log_path = out_path + ".log.csv";
      return cmd_train(load_cli_config(config_path, overrides), bundle_path, out_path, log_path);
    }
    if (command == "eval") {
      if (ckpt_path.empty() || bundle_path.empty() || score_name.empty() || out_path.empty())
        throw ConfigError("eval requires --checkpoint, --bundle, --score and --out");
      return cmd_eval(ckpt_path, bundle_path, score_name, out_path);
    }
    if (command == "sweep") {
      if (out_dir.empty()) throw ConfigError("sweep requires --out-dir");
      return cmd_sweep(load_cli_config(config_path, overrides), out_dir);
    }
    throw ConfigError("unknown command '" + command + "'");
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const NumericFailure& e) {
    std::cerr << "numeric failure: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kExitData;
  } catch (const ContractViolation& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kExitData;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace hood::cli
