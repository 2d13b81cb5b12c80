#pragma once

#include <cstdint>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "hood/common.hpp"
#include "hood/data.hpp"
#include "hood/encoder.hpp"
#include "hood/experiment.hpp"

namespace hood {

/// Invalid or unknown configuration; commands exit with code 2 on this.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// Unreadable or inconsistent data files; commands exit with code 3 on this.
class DataError : public std::runtime_error {
 public:
  explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

/// Merged view of the generator, trainer and plan settings, built from one
/// key = value config file plus --set overrides. Unknown keys are rejected.
struct CliConfig {
  BundleConfig data;
  TrainConfig train;
  std::vector<std::string> methods = {"hood+cor", "ce_only+msp", "mmd+msp", "oe_uniform+msp"};
  std::vector<std::uint64_t> seeds = {1, 2, 3, 4, 5};
  SweepParam sweep_param = SweepParam::None;
  std::vector<double> sweep_values;

  ExperimentPlan plan() const {
    ExperimentPlan p;
    p.bundle = data;
    p.train = train;
    for (const auto& m : methods) p.methods.push_back(parse_method(m));
    p.seeds = seeds;
    p.sweep_param = sweep_param;
    p.sweep_values = sweep_values;
    p.validate();
    return p;
  }

  /// Every key in canonical order with its resolved value.
  std::string echo() const {
    std::ostringstream os;
    std::istringstream data_echo(data.echo());
    std::string line;
    while (std::getline(data_echo, line)) {
      const bool distort_key =
          line.rfind("fake.", 0) == 0 || line.rfind("augment.", 0) == 0;
      os << (distort_key ? "" : "data.") << line << "\n";
    }
    std::istringstream train_echo(train.echo());
    while (std::getline(train_echo, line)) os << "train." << line << "\n";
    os << "plan.methods =";
    for (const auto& m : methods) os << " " << m;
    os << "\n";
    os << "plan.seeds =";
    for (auto s : seeds) os << " " << s;
    os << "\n";
    os << "plan.sweep_param = " << sweep_param_name(sweep_param) << "\n";
    os << "plan.sweep_values =";
    for (double v : sweep_values) os << " " << detail::format_double(v);
    os << "\n";
    return os.str();
  }

  std::string hash() const { return fnv1a_hex(echo()); }
};

namespace cfg_detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline std::uint64_t parse_u64(const std::string& key, const std::string& value) {
  try {
    std::size_t pos = 0;
    if (!value.empty() && value[0] == '-')
      throw ConfigError(key + ": expected a non-negative integer, got '" + value + "'");
    const std::uint64_t v = std::stoull(value, &pos);
    if (pos != value.size()) throw std::invalid_argument("");
    return v;
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception&) {
    throw ConfigError(key + ": expected a non-negative integer, got '" + value + "'");
  }
}

inline double parse_double(const std::string& key, const std::string& value) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(value, &pos);
    if (pos != value.size()) throw std::invalid_argument("");
    return v;
  } catch (const std::exception&) {
    throw ConfigError(key + ": expected a number, got '" + value + "'");
  }
}

inline bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1") return true;
  if (value == "false" || value == "0") return false;
  throw ConfigError(key + ": expected true or false, got '" + value + "'");
}

inline std::vector<std::string> split_list(const std::string& value) {
  std::vector<std::string> items;
  std::string item;
  std::istringstream is(value);
  while (std::getline(is, item, ',')) {
    item = trim(item);
    if (!item.empty()) items.push_back(item);
  }
  return items;
}

}  // namespace cfg_detail

/// Apply one key = value setting. Throws ConfigError on unknown keys or
/// malformed values; range checks run once the whole config is assembled.
inline void apply_config_key(CliConfig& c, const std::string& key, const std::string& value) {
  using namespace cfg_detail;
  // dataset generator
  if (key == "data.classes") c.data.classes = parse_u64(key, value);
  else if (key == "data.dim") c.data.dim = parse_u64(key, value);
  else if (key == "data.n_per_class") c.data.n_per_class = parse_u64(key, value);
  else if (key == "data.n_test_per_class") c.data.n_test_per_class = parse_u64(key, value);
  else if (key == "data.test_ratio_in_out") c.data.test_ratio_in_out = parse_u64(key, value);
  else if (key == "data.inlier_radius") c.data.inlier_radius = parse_double(key, value);
  else if (key == "data.cluster_std") c.data.cluster_std = parse_double(key, value);
  else if (key == "data.min_separation") c.data.min_separation = parse_double(key, value);
  else if (key == "data.ood_std") c.data.ood_std = parse_double(key, value);
  else if (key == "data.train_ood_std") c.data.train_ood_std = parse_double(key, value);
  else if (key == "data.train_ood_clusters") c.data.train_ood_clusters = parse_u64(key, value);
  else if (key == "data.test_ood_clusters") c.data.test_ood_clusters = parse_u64(key, value);
  else if (key == "data.n_train_out") c.data.n_train_out = parse_u64(key, value);
  else if (key == "data.ood_source") c.data.ood_source = parse_ood_source(value);
  else if (key == "data.seed") c.data.seed = parse_u64(key, value);
  // fake-outlier distortion
  else if (key == "fake.noise_scale") c.data.fake.noise_scale = parse_double(key, value);
  else if (key == "fake.permute") c.data.fake.permute = parse_bool(key, value);
  else if (key == "fake.scale_jitter") c.data.fake.scale_jitter = parse_double(key, value);
  else if (key == "fake.strength_n") c.data.fake.strength_n = parse_u64(key, value);
  // real-pool augmentation
  else if (key == "augment.noise_scale") c.data.augment.noise_scale = parse_double(key, value);
  else if (key == "augment.permute") c.data.augment.permute = parse_bool(key, value);
  else if (key == "augment.scale_jitter") c.data.augment.scale_jitter = parse_double(key, value);
  else if (key == "augment.strength_n") c.data.augment.strength_n = parse_u64(key, value);
  // trainer
  else if (key == "train.hidden") {
    c.train.hidden_dims.clear();
    for (const auto& item : split_list(value))
      c.train.hidden_dims.push_back(parse_u64(key, item));
  } else if (key == "train.feature_dim") c.train.feature_dim = parse_u64(key, value);
  else if (key == "train.activation") c.train.activation = parse_activation(value);
  else if (key == "train.objective") c.train.objective = parse_objective(value);
  else if (key == "train.lambda") c.train.lambda = parse_double(key, value);
  else if (key == "train.kernel") c.train.kernel.kind = parse_kernel_kind(value);
  else if (key == "train.sigma") c.train.kernel.sigma = parse_double(key, value);
  else if (key == "train.imq_c") c.train.kernel.imq_c = parse_double(key, value);
  else if (key == "train.epochs") c.train.epochs = parse_u64(key, value);
  else if (key == "train.base_lr") c.train.base_lr = parse_double(key, value);
  else if (key == "train.final_lr") c.train.final_lr = parse_double(key, value);
  else if (key == "train.momentum") c.train.momentum = parse_double(key, value);
  else if (key == "train.weight_decay") c.train.weight_decay = parse_double(key, value);
  else if (key == "train.batch_in") c.train.batch_in = parse_u64(key, value);
  else if (key == "train.ratio_out_in") c.train.ratio_out_in = parse_u64(key, value);
  else if (key == "train.seed") c.train.seed = parse_u64(key, value);
  // experiment plan
  else if (key == "plan.methods") c.methods = split_list(value);
  else if (key == "plan.seeds") {
    c.seeds.clear();
    for (const auto& item : split_list(value)) c.seeds.push_back(parse_u64(key, item));
  } else if (key == "plan.sweep_param") c.sweep_param = parse_sweep_param(value);
  else if (key == "plan.sweep_values") {
    c.sweep_values.clear();
    for (const auto& item : split_list(value)) c.sweep_values.push_back(parse_double(key, item));
  } else {
    throw ConfigError("unknown config key '" + key + "'");
  }
}

/// Parse a config file (may be empty for all-defaults) and apply overrides of
/// the form key=value. Enum and range violations surface as ConfigError.
inline CliConfig load_cli_config(const std::string& path,
                                 const std::vector<std::string>& overrides) {
  CliConfig c;
  auto apply = [&c](const std::string& key, const std::string& value) {
    try {
      apply_config_key(c, key, value);
    } catch (const ContractViolation& e) {
      throw ConfigError(key + ": " + e.what());
    }
  };
  if (!path.empty()) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      const auto hash = line.find('#');
      if (hash != std::string::npos) line = line.substr(0, hash);
      line = cfg_detail::trim(line);
      if (line.empty()) continue;
      const auto eq = line.find('=');
      if (eq == std::string::npos)
        throw ConfigError(path + ":" + std::to_string(lineno) + ": expected key = value");
      apply(cfg_detail::trim(line.substr(0, eq)), cfg_detail::trim(line.substr(eq + 1)));
    }
  }
  for (const auto& setting : overrides) {
    const auto eq = setting.find('=');
    if (eq == std::string::npos)
      throw ConfigError("--set expects key=value, got '" + setting + "'");
    apply(cfg_detail::trim(setting.substr(0, eq)), cfg_detail::trim(setting.substr(eq + 1)));
  }
  try {
    c.data.validate();
    c.train.validate();
  } catch (const ContractViolation& e) {
    throw ConfigError(e.what());
  }
  return c;
}

}  // namespace hood
