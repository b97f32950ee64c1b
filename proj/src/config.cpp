#include "postadc/config.hpp"

#include <algorithm>
#include <array>
#include <string_view>
#include <cmath>
#include <fstream>
#include <sstream>

#include "postadc/errors.hpp"

namespace postadc {

namespace {

// Canonical key order for echoing; doubles as the list of known keys.
constexpr std::array<const char*, 31> kKeys = {
    "algorithm",      "rule",          "family",
    "a",              "d",             "m_per_axis",
    "n_init",         "n_steps",       "sigma2",
    "alpha",          "ci_alpha",      "kappa",
    "gamma",          "bandwidth",     "tau2",
    "window_base",    "top_n",         "region_lo",
    "region_hi",      "target_point",  "length_scale",
    "kernel_variance", "replicates",   "master_seed",
    "methods",        "data_path",     "feature_columns",
    "response_column", "max_candidates", "threads",
    "timing",
};

bool known_key(const std::string& key) {
  return std::find_if(kKeys.begin(), kKeys.end(), [&](const char* k) {
           return key == k;
         }) != kKeys.end();
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string& key, const std::string& value) {
  try {
    std::size_t pos = 0;
    const double out = std::stod(value, &pos);
    if (pos != value.size()) throw std::invalid_argument(value);
    return out;
  } catch (const std::exception&) {
    throw ConfigError("config key '" + key + "': not a number: " + value);
  }
}

long parse_int(const std::string& key, const std::string& value) {
  try {
    std::size_t pos = 0;
    const long out = std::stol(value, &pos);
    if (pos != value.size()) throw std::invalid_argument(value);
    return out;
  } catch (const std::exception&) {
    throw ConfigError("config key '" + key + "': not an integer: " + value);
  }
}

Eigen::VectorXd parse_vector(const std::string& key, const std::string& value) {
  const std::vector<std::string> parts = split_list(value);
  Eigen::VectorXd out(parts.size());
  for (std::size_t i = 0; i < parts.size(); ++i) {
    out[i] = parse_double(key, parts[i]);
  }
  return out;
}

}  // namespace

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(text);
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::string method_name(Method method) {
  switch (method) {
    case Method::PostAdc: return "post_adc";
    case Method::Naive: return "naive";
    case Method::Bonferroni: return "bonferroni";
    case Method::WoEta: return "wo_eta";
    case Method::WoT: return "wo_t";
    case Method::Randomized: return "randomized";
  }
  return "?";
}

Method parse_method(const std::string& name) {
  if (name == "post_adc") return Method::PostAdc;
  if (name == "naive") return Method::Naive;
  if (name == "bonferroni") return Method::Bonferroni;
  if (name == "wo_eta") return Method::WoEta;
  if (name == "wo_t" || name == "wo_T") return Method::WoT;
  if (name == "randomized") return Method::Randomized;
  throw ConfigError("unknown method: " + name);
}

std::string ExperimentConfig::algorithm_name() const {
  return algorithm == Algorithm::GpUcb ? "gpucb" : "tpe";
}

Config::Config() {
  values_["algorithm"] = "gpucb";
  values_["rule"] = "high_low_region";
  values_["family"] = "constant_zero";
  values_["a"] = "0";
  values_["d"] = "1";
  values_["m_per_axis"] = "64";
  values_["n_init"] = "5";
  values_["n_steps"] = "15";
  values_["sigma2"] = "1";
  values_["alpha"] = "0.05";
  values_["ci_alpha"] = "0.1";
  values_["kappa"] = "2";
  values_["gamma"] = "0.2";
  values_["bandwidth"] = "0.1";
  values_["tau2"] = "0.5";
  values_["window_base"] = "0.2";
  values_["top_n"] = "1";
  values_["region_lo"] = "";
  values_["region_hi"] = "";
  values_["target_point"] = "";
  values_["length_scale"] = "";  // empty: 0.1 sqrt(d)
  values_["kernel_variance"] = "1";
  values_["replicates"] = "1000";
  values_["master_seed"] = "1";
  values_["methods"] = "post_adc,naive,bonferroni";
  values_["data_path"] = "";
  values_["feature_columns"] = "";
  values_["response_column"] = "";
  values_["max_candidates"] = "1024";
  values_["threads"] = "0";
  values_["timing"] = "0";
}

Config Config::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  Config config;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(path + ":" + std::to_string(lineno) +
                        ": expected key=value");
    }
    config.set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return config;
}

void Config::set(const std::string& key_value) {
  const auto eq = key_value.find('=');
  if (eq == std::string::npos) {
    throw ConfigError("override must be key=value: " + key_value);
  }
  set(trim(key_value.substr(0, eq)), trim(key_value.substr(eq + 1)));
}

void Config::set(const std::string& key, const std::string& value) {
  if (!known_key(key)) throw ConfigError("unknown config key: " + key);
  values_[key] = value;
}

const std::string& Config::get(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) throw ConfigError("unknown config key: " + key);
  return it->second;
}

std::string Config::echo() const {
  std::string out;
  for (const char* key : kKeys) {
    // threads is an execution detail; results must not depend on it, so
    // keeping it out of the header lets reruns compare byte for byte.
    if (std::string_view(key) == "threads") continue;
    out += "# ";
    out += key;
    out += "=";
    out += values_.at(key);
    out += "\n";
  }
  return out;
}

ExperimentConfig Config::resolve() const {
  ExperimentConfig ec;

  const std::string algorithm = get("algorithm");
  if (algorithm == "gpucb" || algorithm == "ucb") {
    ec.algorithm = Algorithm::GpUcb;
  } else if (algorithm == "tpe") {
    ec.algorithm = Algorithm::Tpe;
  } else {
    throw ConfigError("unknown algorithm: " + algorithm);
  }

  ec.dim = static_cast<int>(parse_int("d", get("d")));
  if (ec.dim < 1) throw ConfigError("d must be >= 1");
  ec.m_per_axis = static_cast<int>(parse_int("m_per_axis", get("m_per_axis")));
  ec.n_init = static_cast<int>(parse_int("n_init", get("n_init")));
  ec.n_steps = static_cast<int>(parse_int("n_steps", get("n_steps")));
  ec.replicates = static_cast<int>(parse_int("replicates", get("replicates")));
  if (ec.replicates < 1) throw ConfigError("replicates must be >= 1");
  ec.sigma2 = parse_double("sigma2", get("sigma2"));
  if (!(ec.sigma2 > 0.0)) throw ConfigError("sigma2 must be > 0");
  ec.alpha = parse_double("alpha", get("alpha"));
  ec.ci_alpha = parse_double("ci_alpha", get("ci_alpha"));
  for (double a : {ec.alpha, ec.ci_alpha}) {
    if (!(a > 0.0 && a < 1.0)) throw ConfigError("alpha must lie in (0,1)");
  }
  ec.tau2 = parse_double("tau2", get("tau2"));
  if (ec.tau2 < 0.0) throw ConfigError("tau2 must be >= 0");
  ec.master_seed =
      static_cast<std::uint64_t>(parse_int("master_seed", get("master_seed")));

  ec.gp.kappa = parse_double("kappa", get("kappa"));
  ec.gp.kernel_variance =
      parse_double("kernel_variance", get("kernel_variance"));
  ec.gp.noise_variance = ec.sigma2;
  const std::string ls = get("length_scale");
  ec.gp.length_scale =
      ls.empty() ? 0.1 * std::sqrt(double(ec.dim)) : parse_double("length_scale", ls);

  ec.tpe.gamma = parse_double("gamma", get("gamma"));
  ec.tpe.bandwidth = parse_double("bandwidth", get("bandwidth"));

  ec.objective.family = parse_objective_family(get("family"));
  ec.objective.amplitude = parse_double("a", get("a"));

  ec.target.rule = parse_target_rule(get("rule"));
  ec.target.window_side =
      side_length_for_dim(ec.dim, parse_double("window_base", get("window_base")));
  ec.target.top_n = static_cast<int>(parse_int("top_n", get("top_n")));
  if (!get("region_lo").empty()) {
    ec.target.region_lo = parse_vector("region_lo", get("region_lo"));
    ec.target.region_hi = parse_vector("region_hi", get("region_hi"));
  }
  if (!get("target_point").empty()) {
    ec.target.target_point = parse_vector("target_point", get("target_point"));
  }
  ec.target.gp = ec.gp;

  ec.methods.clear();
  for (const std::string& m : split_list(get("methods"))) {
    ec.methods.push_back(parse_method(m));
  }
  if (ec.methods.empty()) throw ConfigError("methods must be nonempty");

  ec.data_path = get("data_path");
  ec.feature_columns = split_list(get("feature_columns"));
  ec.response_column = get("response_column");
  ec.max_candidates =
      static_cast<int>(parse_int("max_candidates", get("max_candidates")));
  ec.threads = static_cast<int>(parse_int("threads", get("threads")));
  ec.timing = parse_int("timing", get("timing")) != 0;
  return ec;
}

std::vector<ExperimentConfig> Config::sweep_grid() const {
  const std::vector<std::string> algorithms = split_list(get("algorithm"));
  const std::vector<std::string> families = split_list(get("family"));
  const std::vector<std::string> amplitudes = split_list(get("a"));
  const std::vector<std::string> steps = split_list(get("n_steps"));
  if (algorithms.empty() || families.empty() || amplitudes.empty() ||
      steps.empty()) {
    throw ConfigError("sweep grid keys must be nonempty");
  }

  std::vector<ExperimentConfig> grid;
  for (const std::string& algorithm : algorithms) {
    for (const std::string& family : families) {
      for (const std::string& a : amplitudes) {
        for (const std::string& n : steps) {
          Config cell = *this;
          cell.set("algorithm", algorithm);
          cell.set("family", family);
          cell.set("a", a);
          cell.set("n_steps", n);
          grid.push_back(cell.resolve());
        }
      }
    }
  }
  return grid;
}

}  // namespace postadc
