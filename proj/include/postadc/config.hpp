#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "postadc/adc.hpp"
#include "postadc/objectives.hpp"
#include "postadc/targets.hpp"

namespace postadc {

enum class Method { PostAdc, Naive, Bonferroni, WoEta, WoT, Randomized };

std::string method_name(Method method);
Method parse_method(const std::string& name);

//! Fully resolved settings for one experiment cell.
struct ExperimentConfig {
  Algorithm algorithm = Algorithm::GpUcb;
  GpUcbConfig gp;
  TpeConfig tpe;
  TargetSpec target;
  ObjectiveSpec objective;
  int dim = 1;
  int m_per_axis = 64;
  int n_init = 5;
  int n_steps = 15;
  int replicates = 1000;
  double sigma2 = 1.0;
  double alpha = 0.05;     // test level
  double ci_alpha = 0.10;  // interval miscoverage (0.90 coverage)
  double tau2 = 0.0;
  std::uint64_t master_seed = 1;
  std::vector<Method> methods{Method::PostAdc};
  std::string data_path;
  std::vector<std::string> feature_columns;
  std::string response_column;
  int max_candidates = 1024;
  int threads = 0;  // 0: hardware concurrency
  bool timing = false;

  std::string algorithm_name() const;
};

//! Flat key=value configuration: documented keys, file values overridden
//! by command-line key=value pairs, echoed verbatim into output headers.
class Config {
 public:
  Config();  // defaults

  static Config from_file(const std::string& path);

  //! Applies one "key=value" override; unknown keys are rejected.
  void set(const std::string& key_value);
  void set(const std::string& key, const std::string& value);

  const std::string& get(const std::string& key) const;

  //! "# key=value" lines for every effective key, canonical order.
  std::string echo() const;

  //! Validates and resolves into a single experiment cell. Sweepable
  //! keys (algorithm, family, a, n_steps) must be single-valued here.
  ExperimentConfig resolve() const;

  //! Expands comma lists in the sweepable keys into a grid of cells,
  //! cartesian order: algorithm, family, a, n_steps.
  std::vector<ExperimentConfig> sweep_grid() const;

 private:
  std::map<std::string, std::string> values_;
};

std::vector<std::string> split_list(const std::string& text);

}  // namespace postadc
