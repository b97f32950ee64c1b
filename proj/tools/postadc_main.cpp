// Command-line front end: single-shot inference, Monte Carlo sweeps,
// closed-form toy checks and replay-scan verification of the truncation
// sets, all driven by a flat key=value config with command-line
// overrides.
#include <CLI11.hpp>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "postadc/config.hpp"
#include "postadc/errors.hpp"
#include "postadc/harness.hpp"
#include "postadc/verify.hpp"

namespace {

using namespace postadc;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitDegenerate = 4;
constexpr int kExitVerification = 5;

Config load_config(const std::string& path,
                   const std::vector<std::string>& overrides) {
  Config config = path.empty() ? Config() : Config::from_file(path);
  for (const std::string& kv : overrides) config.set(kv);
  return config;
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot open output file: " + path);
  out << text;
}

std::string diagnostics_block(const InferDiagnostics& diag) {
  std::string out;
  char buf[160];
  std::snprintf(buf, sizeof(buf), "# diag t_obs=%.17g\n# diag v=%.17g\n",
                diag.t_obs, diag.v);
  out += buf;
  out += "# diag trajectory=";
  for (std::size_t i = 0; i < diag.trajectory.size(); ++i) {
    if (i) out += ';';
    out += std::to_string(diag.trajectory[i]);
  }
  out += "\n# diag z_full=" + diag.z_full;
  out += "\n# diag z_wo_eta=" + diag.z_wo_eta;
  out += "\n# diag z_wo_t=" + diag.z_wo_t;
  std::snprintf(buf, sizeof(buf),
                "\n# diag constraints_trajectory=%d\n"
                "# diag constraints_target=%d\n",
                diag.n_trajectory_constraints, diag.n_target_constraints);
  out += buf;
  return out;
}

int cmd_infer(const Config& config, const std::string& out_path,
              const std::string& dump_path, bool dump_only, int verbosity) {
  const ExperimentConfig cell = config.resolve();
  InferDiagnostics diag;
  ReplicateRecord record;
  if (!cell.data_path.empty()) {
    const RealDataset dataset =
        load_real_csv(cell.data_path, cell.feature_columns,
                      cell.response_column, cell.max_candidates,
                      cell.master_seed);
    record = bootstrap_replicate(dataset, cell, 0, &diag);
  } else {
    record = run_replicate(cell, 0, &diag);
  }
  if (!diag.available) {
    throw DegenerateSelection("infer: " + diag.skip_reason);
  }

  if (!dump_path.empty()) write_file(dump_path, diag.constraint_dump);
  if (dump_only) {
    if (verbosity > 0) {
      std::cerr << "constraints written ("
                << diag.n_trajectory_constraints + diag.n_target_constraints
                << " rows)\n";
    }
    return kExitOk;
  }

  std::string text = config.echo();
  text += diagnostics_block(diag);
  text += replicate_csv_header();
  text += replicate_csv_rows({record});
  if (out_path.empty()) {
    std::cout << text;
  } else {
    write_file(out_path, text);
  }
  return kExitOk;
}

int cmd_sweep(const Config& config, const std::string& out_path,
              const std::string& agg_path, int verbosity) {
  const std::vector<ExperimentConfig> grid = config.sweep_grid();

  std::string rows_text = config.echo();
  rows_text += replicate_csv_header();
  std::string agg_text = config.echo();
  agg_text += aggregate_csv_header();

  for (const ExperimentConfig& cell : grid) {
    if (verbosity > 0) {
      std::cerr << "cell algorithm=" << cell.algorithm_name()
                << " family=" << objective_family_name(cell.objective.family)
                << " a=" << cell.objective.amplitude
                << " n_steps=" << cell.n_steps << " ..." << std::endl;
    }
    char marker[160];
    std::snprintf(marker, sizeof(marker),
                  "# cell algorithm=%s family=%s a=%.17g n_steps=%d\n",
                  cell.algorithm_name().c_str(),
                  objective_family_name(cell.objective.family).c_str(),
                  cell.objective.amplitude, cell.n_steps);
    rows_text += marker;

    std::vector<ReplicateRecord> records;
    if (!cell.data_path.empty()) {
      const RealDataset dataset =
          load_real_csv(cell.data_path, cell.feature_columns,
                        cell.response_column, cell.max_candidates,
                        cell.master_seed);
      records = run_bootstrap_replicates(dataset, cell, cell.threads);
    } else {
      records = run_replicates(cell, cell.threads);
    }
    rows_text += replicate_csv_rows(records);
    agg_text += aggregate_csv_rows(aggregate_records(cell, records));
  }

  write_file(out_path, rows_text);
  write_file(agg_path, agg_text);
  if (verbosity > 0) {
    std::cerr << "wrote " << out_path << " and " << agg_path << "\n";
  }
  return kExitOk;
}

int cmd_toy_check(int draws, std::uint64_t seed) {
  const ToyCheckReport report = toy_check(draws, seed);
  std::printf("toy-check: %d draws, branch counts %d/%d/%d/%d, "
              "max endpoint error %.3g\n",
              report.draws, report.branch_counts[0], report.branch_counts[1],
              report.branch_counts[2], report.branch_counts[3],
              report.max_endpoint_error);
  if (!report.pass) {
    std::printf("toy-check: FAIL %s\n", report.detail.c_str());
    return kExitVerification;
  }
  std::printf("toy-check: PASS\n");
  return kExitOk;
}

int cmd_scan_verify(const Config& config, int instances, int grid_points,
                    bool corrupt) {
  int failures = 0;
  for (const std::string& algorithm : split_list(config.get("algorithm"))) {
    Config one = config;
    one.set("algorithm", algorithm);
    const ScanVerifyReport report =
        scan_verify(one.resolve(), instances, grid_points, corrupt);
    std::printf("scan-verify %s: %d instances, %d points, %d mismatches, "
                "%d degenerate skips\n",
                algorithm.c_str(), report.instances, report.points_checked,
                report.mismatches, report.degenerate_skips);
    if (!report.pass) {
      std::printf("scan-verify %s: FAIL %s\n", algorithm.c_str(),
                  report.detail.c_str());
      ++failures;
    } else {
      std::printf("scan-verify %s: PASS\n", algorithm.c_str());
    }
  }
  return failures == 0 ? kExitOk : kExitVerification;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"post-ADC selective inference"};
  app.require_subcommand(1);

  std::string config_path, out_path, agg_path, dump_path;
  std::vector<std::string> overrides;
  int verbosity = 0;
  app.add_flag("-v,--verbose", verbosity, "increase verbosity");

  CLI::App* infer = app.add_subcommand("infer", "one end-to-end inference");
  infer->add_option("-c,--config", config_path, "config file");
  infer->add_option("-o,--output", out_path, "output file (default stdout)");
  infer->add_option("--dump-constraints", dump_path,
                    "also dump the selection-event constraints");
  infer->add_option("overrides", overrides, "key=value overrides");

  CLI::App* sweep = app.add_subcommand("sweep", "Monte Carlo sweep");
  std::string sweep_out = "replicates.csv";
  std::string sweep_agg;
  sweep->add_option("-c,--config", config_path, "config file");
  sweep->add_option("-o,--output", sweep_out, "replicate-level output file");
  sweep->add_option("--aggregate-output", sweep_agg,
                    "aggregate output file (default <output>.agg.csv)");
  sweep->add_option("overrides", overrides, "key=value overrides");

  CLI::App* toy = app.add_subcommand("toy-check",
                                     "closed-form truncation-set check");
  int toy_draws = 1000;
  std::uint64_t toy_seed = 20240601;
  toy->add_option("--draws", toy_draws, "number of random draws");
  toy->add_option("--seed", toy_seed, "generator seed");

  CLI::App* scan = app.add_subcommand(
      "scan-verify", "replay-scan verification of truncation sets");
  int scan_instances = 100;
  int scan_grid = 2001;
  bool scan_corrupt = false;
  scan->add_option("-c,--config", config_path, "config file");
  scan->add_option("--instances", scan_instances, "instances per algorithm");
  scan->add_option("--grid", scan_grid, "scan grid points");
  scan->add_flag("--corrupt-constraint", scan_corrupt,
                 "negative control: corrupt the computed set first")
      ->group("");
  scan->add_option("overrides", overrides, "key=value overrides");

  CLI::App* dump = app.add_subcommand("dump-constraints",
                                      "write the selection-event constraints");
  dump->add_option("-c,--config", config_path, "config file");
  dump->add_option("-o,--output", dump_path, "constraint dump file")
      ->required();
  dump->add_option("overrides", overrides, "key=value overrides");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (infer->parsed()) {
      return cmd_infer(load_config(config_path, overrides), out_path,
                       dump_path, false, verbosity);
    }
    if (sweep->parsed()) {
      if (sweep_agg.empty()) sweep_agg = sweep_out + ".agg.csv";
      return cmd_sweep(load_config(config_path, overrides), sweep_out,
                       sweep_agg, verbosity);
    }
    if (toy->parsed()) return cmd_toy_check(toy_draws, toy_seed);
    if (scan->parsed()) {
      Config config = load_config(config_path, overrides);
      if (config_path.empty()) {
        // desk-scale verification instance
        config.set("m_per_axis", "16");
        config.set("n_init", "3");
        config.set("n_steps", "8");
        for (const std::string& kv : overrides) config.set(kv);
      }
      return cmd_scan_verify(config, scan_instances, scan_grid, scan_corrupt);
    }
    if (dump->parsed()) {
      return cmd_infer(load_config(config_path, overrides), "", dump_path,
                       true, verbosity);
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const DegenerateSelection& e) {
    std::cerr << "degenerate selection: " << e.what() << "\n";
    return kExitDegenerate;
  } catch (const VerificationError& e) {
    std::cerr << "verification failure: " << e.what() << "\n";
    return kExitVerification;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumerical;
  }
  return kExitConfig;
}
