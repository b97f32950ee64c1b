#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "postadc/candidates.hpp"
#include "postadc/config.hpp"
#include "postadc/geometry.hpp"
#include "postadc/truncated_normal.hpp"

namespace postadc {

//! One output row: a (replicate, method) pair. NaN doubles and -1 flags
//! render as empty CSV fields.
struct MethodRow {
  std::string method;
  double p_value = std::numeric_limits<double>::quiet_NaN();
  double ci_lo = std::numeric_limits<double>::quiet_NaN();
  double ci_hi = std::numeric_limits<double>::quiet_NaN();
  double ci_length = std::numeric_limits<double>::quiet_NaN();
  int reject = -1;
  int cover = -1;
  double delta_true = std::numeric_limits<double>::quiet_NaN();
  double z_lo = std::numeric_limits<double>::quiet_NaN();
  double z_hi = std::numeric_limits<double>::quiet_NaN();
  bool skipped = false;
  std::string skip_reason;
  long wall_ms = 0;
};

struct ReplicateRecord {
  long replicate_id = 0;
  std::vector<MethodRow> rows;
};

//! Selection-event details of a single run, for reports and dumps.
struct InferDiagnostics {
  bool available = false;
  double t_obs = 0.0;
  double v = 0.0;
  std::vector<int> trajectory;
  std::string z_full;
  std::string z_wo_eta;
  std::string z_wo_t;
  int n_trajectory_constraints = 0;
  int n_target_constraints = 0;
  std::string constraint_dump;
  std::string skip_reason;
};

//! Runs the full pipeline for one replicate against precomputed
//! candidates and objective means. All randomness derives from
//! mix_seed(master_seed, replicate_id).
ReplicateRecord run_replicate_cell(const ExperimentConfig& config,
                                   const CandidateSet& candidates,
                                   const Eigen::VectorXd& mu,
                                   long replicate_id,
                                   InferDiagnostics* diag = nullptr);

//! Convenience wrapper that builds the grid and objective first.
ReplicateRecord run_replicate(const ExperimentConfig& config,
                              long replicate_id,
                              InferDiagnostics* diag = nullptr);

//! All replicates of one cell, parallel across replicate ids. The output
//! is identical for every worker count.
std::vector<ReplicateRecord> run_replicates(const ExperimentConfig& config,
                                            int threads);

struct AggregateRow {
  std::string algorithm;
  std::string rule;
  std::string family;
  double amplitude = 0.0;
  int dim = 0;
  int m_per_axis = 0;
  int n_init = 0;
  int n_steps = 0;
  double sigma2 = 0.0;
  double alpha = 0.0;
  std::string method;
  int n_effective = 0;
  double reject_rate = std::numeric_limits<double>::quiet_NaN();
  double reject_se = std::numeric_limits<double>::quiet_NaN();
  double coverage_rate = std::numeric_limits<double>::quiet_NaN();
  double coverage_se = std::numeric_limits<double>::quiet_NaN();
  double ci_length_median = std::numeric_limits<double>::quiet_NaN();
  double ci_length_q90 = std::numeric_limits<double>::quiet_NaN();
};

std::vector<AggregateRow> aggregate_records(
    const ExperimentConfig& config, const std::vector<ReplicateRecord>& records);

//! Replicate-level and aggregate CSV rendering (comma separated, one
//! header row; doubles at full precision for byte-stable reruns).
std::string replicate_csv_header();
std::string replicate_csv_rows(const std::vector<ReplicateRecord>& records);
std::string aggregate_csv_header();
std::string aggregate_csv_rows(const std::vector<AggregateRow>& rows);

//! One-sample Kolmogorov-Smirnov check against Uniform(0,1).
struct KsResult {
  double statistic = 0.0;
  double critical = 0.0;
  bool pass = false;
};

KsResult uniformity_check(std::vector<double> pvalues,
                          double significance = 0.01);

//! Real-data table keyed by candidate: every original row whose projected
//! features map to a candidate contributes one stored response.
struct RealDataset {
  CandidateSet candidates;
  std::vector<std::vector<double>> responses;  // per candidate
  int total_rows = 0;
};

RealDataset load_real_csv(const std::string& path,
                          const std::vector<std::string>& feature_columns,
                          const std::string& response_column,
                          int max_candidates, std::uint64_t seed);

//! Bootstrap run on real data: queries read a stored row for the queried
//! candidate; the true effect is unavailable, so coverage is not scored.
ReplicateRecord bootstrap_replicate(const RealDataset& dataset,
                                    const ExperimentConfig& config,
                                    long replicate_id,
                                    InferDiagnostics* diag = nullptr);

std::vector<ReplicateRecord> run_bootstrap_replicates(
    const RealDataset& dataset, const ExperimentConfig& config, int threads);

}  // namespace postadc
