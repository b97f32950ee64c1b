#include "postadc/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <mutex>
#include <thread>

#include "postadc/errors.hpp"
#include "postadc/normal.hpp"
#include "postadc/objectives.hpp"
#include "postadc/rng.hpp"

namespace postadc {

namespace {

constexpr double kBonferroniWindowBase = 3.0;

std::string fmt(double x) {
  if (std::isnan(x)) return "";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

std::string fmt_flag(int flag) {
  return flag < 0 ? "" : std::to_string(flag);
}

bool needs(const ExperimentConfig& config, Method m) {
  return std::find(config.methods.begin(), config.methods.end(), m) !=
         config.methods.end();
}

MethodRow skipped_row(Method m, const std::string& reason) {
  MethodRow row;
  row.method = method_name(m);
  row.skipped = true;
  row.skip_reason = reason;
  return row;
}

void fill_interval(MethodRow& row, double lo, double hi) {
  row.ci_lo = lo;
  row.ci_hi = hi;
  row.ci_length = hi - lo;
}

void fill_flags(MethodRow& row, double alpha, double delta_true,
                bool have_delta) {
  row.reject = row.p_value <= alpha ? 1 : 0;
  if (have_delta) {
    row.delta_true = delta_true;
    row.cover = (delta_true >= row.ci_lo && delta_true <= row.ci_hi) ? 1 : 0;
  }
}

// Optimizer sees the randomized responses; the unperturbed ones are
// retained per step for inference.
class RandomizedSyntheticSource : public ResponseSource {
 public:
  RandomizedSyntheticSource(const Eigen::VectorXd& mu,
                            const Eigen::VectorXd& eps,
                            const Eigen::VectorXd& omega)
      : mu_(mu), eps_(eps), omega_(omega), y_true_(eps.size()) {}

  double response(int step, int candidate_index) override {
    y_true_[step] = mu_[candidate_index] + eps_[step];
    return y_true_[step] + omega_[step];
  }

  const Eigen::VectorXd& y_true() const { return y_true_; }

 private:
  const Eigen::VectorXd& mu_;
  const Eigen::VectorXd& eps_;
  const Eigen::VectorXd& omega_;
  Eigen::VectorXd y_true_;
};

class BootstrapSource : public ResponseSource {
 public:
  BootstrapSource(const RealDataset& dataset, std::uint64_t seed)
      : dataset_(dataset), rng_(seed) {}

  double response(int /*step*/, int candidate_index) override {
    const auto& rows = dataset_.responses[candidate_index];
    return rows[rng_.next_below(rows.size())];
  }

 private:
  const RealDataset& dataset_;
  SplitMix64 rng_;
};

struct SelectivePieces {
  LineSlice line;
  IntervalSet z_full;
  IntervalSet z_wo_eta;
  IntervalSet z_wo_t;
  std::vector<LinearConstraint> trajectory;
  std::vector<LinearConstraint> target;
};

// Shared geometry for post_adc and the two ablations: constraint families
// are extracted once and solved under each mask.
SelectivePieces build_geometry(const TrajectoryModel& model,
                               const CandidateSet& candidates,
                               const ObservedRun& run, double sigma2) {
  SelectivePieces out;
  out.line = compute_line(run.target.eta, sigma2, run.data.y);
  out.trajectory = trajectory_constraints(model, candidates,
                                          run.data.trajectory,
                                          run.data.n_init, out.line,
                                          run.data.y);
  out.target = target_constraints(run.target,
                                  run.trajectory_points(candidates), out.line);
  std::vector<LinearConstraint> all = out.trajectory;
  all.insert(all.end(), out.target.begin(), out.target.end());
  out.z_full = solve_constraints(all, out.line.t_obs);
  out.z_wo_eta = solve_constraints(out.trajectory, out.line.t_obs);
  out.z_wo_t = solve_constraints(out.target, out.line.t_obs);
  return out;
}

MethodRow selective_row(Method m, const LineSlice& line, const IntervalSet& z,
                        const ExperimentConfig& config, double delta_true,
                        bool have_delta) {
  MethodRow row;
  row.method = method_name(m);
  row.p_value = selective_p(line.t_obs, line.v_eta, z);
  std::string note;
  const auto [lo, hi] =
      selective_ci(line.t_obs, line.v_eta, z, config.ci_alpha, &note);
  fill_interval(row, lo, hi);
  fill_flags(row, config.alpha, delta_true, have_delta);
  row.z_lo = z.hull_lo();
  row.z_hi = z.hull_hi();
  return row;
}

ReplicateRecord run_pipeline(const ExperimentConfig& config,
                             const CandidateSet& candidates,
                             const Eigen::VectorXd* mu,
                             const RealDataset* dataset, long replicate_id,
                             InferDiagnostics* diag = nullptr) {
  const auto t_start = std::chrono::steady_clock::now();
  ReplicateRecord record;
  record.replicate_id = replicate_id;

  const std::uint64_t rep_seed = mix_seed(config.master_seed, replicate_id);
  const std::uint64_t init_seed = mix_seed(rep_seed, 1);
  SplitMix64 noise_rng(mix_seed(rep_seed, 2));

  const int total = config.n_init + config.n_steps;
  const auto model = make_model(config.algorithm, config.gp, config.tpe);
  const bool have_delta = mu != nullptr;

  const bool any_selective = needs(config, Method::PostAdc) ||
                             needs(config, Method::WoEta) ||
                             needs(config, Method::WoT) ||
                             needs(config, Method::Naive) ||
                             needs(config, Method::Bonferroni);

  if (any_selective) {
    CollectedData data;
    if (dataset != nullptr) {
      BootstrapSource source(*dataset, mix_seed(rep_seed, 4));
      data = run_adc(*model, source, candidates, config.n_init,
                     config.n_steps, init_seed);
    } else {
      Eigen::VectorXd eps(total);
      for (int t = 0; t < total; ++t) {
        eps[t] = std::sqrt(config.sigma2) * noise_rng.next_gaussian();
      }
      SyntheticSource source(*mu, eps);
      data = run_adc(*model, source, candidates, config.n_init,
                     config.n_steps, init_seed);
    }

    std::string degenerate;
    ObservedRun run;
    run.data = std::move(data);
    try {
      run.target = select_target(config.target,
                                 run.trajectory_points(candidates), run.data.y);
    } catch (const DegenerateSelection& e) {
      degenerate = e.what();
    }

    double delta_true = 0.0;
    if (degenerate.empty() && have_delta) {
      for (std::size_t t = 0; t < run.data.trajectory.size(); ++t) {
        delta_true += run.target.eta[t] * (*mu)[run.data.trajectory[t]];
      }
    }

    SelectivePieces geom;
    const bool any_truncated = needs(config, Method::PostAdc) ||
                               needs(config, Method::WoEta) ||
                               needs(config, Method::WoT);
    if (degenerate.empty()) {
      if (any_truncated || diag != nullptr) {
        geom = build_geometry(*model, candidates, run, config.sigma2);
      } else {
        geom.line = compute_line(run.target.eta, config.sigma2, run.data.y);
      }
    }
    if (diag != nullptr) {
      if (degenerate.empty()) {
        diag->available = true;
        diag->t_obs = geom.line.t_obs;
        diag->v = geom.line.v_eta;
        diag->trajectory = run.data.trajectory;
        diag->z_full = geom.z_full.str();
        diag->z_wo_eta = geom.z_wo_eta.str();
        diag->z_wo_t = geom.z_wo_t.str();
        diag->n_trajectory_constraints =
            static_cast<int>(geom.trajectory.size());
        diag->n_target_constraints = static_cast<int>(geom.target.size());
        std::vector<LinearConstraint> all = geom.trajectory;
        all.insert(all.end(), geom.target.begin(), geom.target.end());
        diag->constraint_dump = format_constraints(all);
      } else {
        diag->skip_reason = degenerate;
      }
    }

    for (Method m : config.methods) {
      if (m == Method::Randomized) continue;
      if (!degenerate.empty()) {
        record.rows.push_back(skipped_row(m, degenerate));
        continue;
      }
      MethodRow row;
      switch (m) {
        case Method::PostAdc:
          row = selective_row(m, geom.line, geom.z_full, config, delta_true,
                              have_delta);
          break;
        case Method::WoEta:
          row = selective_row(m, geom.line, geom.z_wo_eta, config, delta_true,
                              have_delta);
          break;
        case Method::WoT:
          row = selective_row(m, geom.line, geom.z_wo_t, config, delta_true,
                              have_delta);
          break;
        case Method::Naive: {
          const SelectiveResult r =
              naive_inference(geom.line.t_obs, geom.line.v_eta,
                              config.ci_alpha);
          row.method = method_name(m);
          row.p_value = r.p_one_sided;
          fill_interval(row, r.ci_lo, r.ci_hi);
          fill_flags(row, config.alpha, delta_true, have_delta);
          break;
        }
        case Method::Bonferroni: {
          const SelectiveResult r = bonferroni_inference(
              geom.line.t_obs, geom.line.v_eta, config.ci_alpha,
              candidates.size(), config.n_steps, kBonferroniWindowBase);
          row.method = method_name(m);
          row.p_value = r.p_one_sided;
          fill_interval(row, r.ci_lo, r.ci_hi);
          fill_flags(row, config.alpha, delta_true, have_delta);
          break;
        }
        default:
          break;
      }
      record.rows.push_back(std::move(row));
    }
  }

  if (needs(config, Method::Randomized)) {
    if (dataset != nullptr) {
      record.rows.push_back(
          skipped_row(Method::Randomized, "randomized_not_supported_on_real_data"));
    } else {
      Eigen::VectorXd eps(total);
      SplitMix64 eps_rng(mix_seed(rep_seed, 2));
      for (int t = 0; t < total; ++t) {
        eps[t] = std::sqrt(config.sigma2) * eps_rng.next_gaussian();
      }
      Eigen::VectorXd omega(total);
      SplitMix64 omega_rng(mix_seed(rep_seed, 3));
      for (int t = 0; t < total; ++t) {
        omega[t] = std::sqrt(config.tau2) * omega_rng.next_gaussian();
      }

      RandomizedSyntheticSource source(*mu, eps, omega);
      ObservedRun run;
      run.data = run_adc(*model, source, candidates, config.n_init,
                         config.n_steps, init_seed);
      try {
        run.target = select_target(
            config.target, run.trajectory_points(candidates), run.data.y);
        const LineSlice line = compute_line(
            run.target.eta, config.sigma2 + config.tau2, run.data.y);
        const IntervalSet z_tilde =
            truncation_set(*model, candidates, run, line);

        const double t_y = run.target.eta.dot(source.y_true());
        const double v = config.sigma2 * run.target.eta.squaredNorm();
        const SelectiveResult r =
            randomized_inference(t_y, v, config.tau2,
                                 run.target.eta.squaredNorm(), z_tilde,
                                 config.ci_alpha);
        MethodRow row;
        row.method = method_name(Method::Randomized);
        row.p_value = r.p_one_sided;
        fill_interval(row, r.ci_lo, r.ci_hi);
        double delta_true = 0.0;
        for (std::size_t t = 0; t < run.data.trajectory.size(); ++t) {
          delta_true += run.target.eta[t] * (*mu)[run.data.trajectory[t]];
        }
        fill_flags(row, config.alpha, delta_true, have_delta);
        row.z_lo = z_tilde.hull_lo();
        row.z_hi = z_tilde.hull_hi();
        record.rows.push_back(std::move(row));
      } catch (const DegenerateSelection& e) {
        record.rows.push_back(skipped_row(Method::Randomized, e.what()));
      }
    }
  }

  if (config.timing) {
    const auto elapsed = std::chrono::steady_clock::now() - t_start;
    const long ms =
        std::chrono::duration_cast<std::chrono::milliseconds>(elapsed).count();
    for (MethodRow& row : record.rows) row.wall_ms = ms;
  }
  return record;
}

std::vector<ReplicateRecord> run_parallel(
    const ExperimentConfig& config, int threads,
    const std::function<ReplicateRecord(long)>& one) {
  const int n = config.replicates;
  std::vector<ReplicateRecord> records(n);
  int workers = threads > 0 ? threads
                            : static_cast<int>(std::thread::hardware_concurrency());
  if (workers < 1) workers = 1;
  workers = std::min(workers, n);

  std::atomic<long> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&]() {
    while (true) {
      const long id = next.fetch_add(1);
      if (id >= n) return;
      try {
        records[id] = one(id);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
        return;
      }
    }
  };

  if (workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
  }
  if (error) std::rethrow_exception(error);
  return records;
}

double quantile_sorted(std::vector<double>& values, double q) {
  if (values.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(values.begin(), values.end());
  const double pos = q * (values.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = static_cast<std::size_t>(std::ceil(pos));
  if (lo == hi) return values[lo];
  const double w = pos - lo;
  return (1.0 - w) * values[lo] + w * values[hi];
}

}  // namespace

ReplicateRecord run_replicate_cell(const ExperimentConfig& config,
                                   const CandidateSet& candidates,
                                   const Eigen::VectorXd& mu,
                                   long replicate_id, InferDiagnostics* diag) {
  return run_pipeline(config, candidates, &mu, nullptr, replicate_id, diag);
}

ReplicateRecord run_replicate(const ExperimentConfig& config,
                              long replicate_id, InferDiagnostics* diag) {
  const CandidateSet candidates = make_grid(config.dim, config.m_per_axis);
  const Eigen::VectorXd mu = synth_objective(config.objective, candidates);
  return run_replicate_cell(config, candidates, mu, replicate_id, diag);
}

std::vector<ReplicateRecord> run_replicates(const ExperimentConfig& config,
                                            int threads) {
  const CandidateSet candidates = make_grid(config.dim, config.m_per_axis);
  const Eigen::VectorXd mu = synth_objective(config.objective, candidates);
  return run_parallel(config, threads, [&](long id) {
    return run_replicate_cell(config, candidates, mu, id);
  });
}

ReplicateRecord bootstrap_replicate(const RealDataset& dataset,
                                    const ExperimentConfig& config,
                                    long replicate_id,
                                    InferDiagnostics* diag) {
  if (dataset.total_rows < config.n_init + config.n_steps) {
    throw ConfigError("bootstrap_replicate: dataset smaller than the budget");
  }
  return run_pipeline(config, dataset.candidates, nullptr, &dataset,
                      replicate_id, diag);
}

std::vector<ReplicateRecord> run_bootstrap_replicates(
    const RealDataset& dataset, const ExperimentConfig& config, int threads) {
  if (dataset.total_rows < config.n_init + config.n_steps) {
    throw ConfigError("bootstrap: dataset smaller than the budget");
  }
  return run_parallel(config, threads, [&](long id) {
    return bootstrap_replicate(dataset, config, id);
  });
}

std::vector<AggregateRow> aggregate_records(
    const ExperimentConfig& config,
    const std::vector<ReplicateRecord>& records) {
  std::vector<AggregateRow> out;
  for (Method m : config.methods) {
    AggregateRow agg;
    agg.algorithm = config.algorithm_name();
    agg.rule = target_rule_name(config.target.rule);
    agg.family = objective_family_name(config.objective.family);
    agg.amplitude = config.objective.amplitude;
    agg.dim = config.dim;
    agg.m_per_axis = config.m_per_axis;
    agg.n_init = config.n_init;
    agg.n_steps = config.n_steps;
    agg.sigma2 = config.sigma2;
    agg.alpha = config.alpha;
    agg.method = method_name(m);

    long n_eff = 0, n_reject = 0, n_cover = 0, n_cover_known = 0;
    std::vector<double> lengths;
    for (const ReplicateRecord& record : records) {
      for (const MethodRow& row : record.rows) {
        if (row.method != agg.method) continue;
        if (row.skipped) continue;
        ++n_eff;
        n_reject += row.reject == 1;
        if (row.cover >= 0) {
          ++n_cover_known;
          n_cover += row.cover == 1;
        }
        lengths.push_back(row.ci_length);
      }
    }
    agg.n_effective = static_cast<int>(n_eff);
    if (n_eff > 0) {
      const double r = double(n_reject) / double(n_eff);
      agg.reject_rate = r;
      agg.reject_se = std::sqrt(r * (1.0 - r) / double(n_eff));
      agg.ci_length_median = quantile_sorted(lengths, 0.5);
      agg.ci_length_q90 = quantile_sorted(lengths, 0.9);
    }
    if (n_cover_known > 0) {
      const double c = double(n_cover) / double(n_cover_known);
      agg.coverage_rate = c;
      agg.coverage_se = std::sqrt(c * (1.0 - c) / double(n_cover_known));
    }
    out.push_back(std::move(agg));
  }
  return out;
}

std::string replicate_csv_header() {
  return "replicate_id,method,p_value,ci_lo,ci_hi,ci_length,reject,cover,"
         "delta_true,z_lo,z_hi,skipped,skip_reason,wall_ms\n";
}

std::string replicate_csv_rows(const std::vector<ReplicateRecord>& records) {
  std::string out;
  for (const ReplicateRecord& record : records) {
    for (const MethodRow& row : record.rows) {
      out += std::to_string(record.replicate_id);
      out += ',';
      out += row.method;
      out += ',';
      out += fmt(row.p_value);
      out += ',';
      out += fmt(row.ci_lo);
      out += ',';
      out += fmt(row.ci_hi);
      out += ',';
      out += fmt(row.ci_length);
      out += ',';
      out += fmt_flag(row.reject);
      out += ',';
      out += fmt_flag(row.cover);
      out += ',';
      out += fmt(row.delta_true);
      out += ',';
      out += fmt(row.z_lo);
      out += ',';
      out += fmt(row.z_hi);
      out += ',';
      out += row.skipped ? "1" : "0";
      out += ',';
      out += row.skip_reason;
      out += ',';
      out += std::to_string(row.wall_ms);
      out += '\n';
    }
  }
  return out;
}

std::string aggregate_csv_header() {
  return "algorithm,rule,family,a,d,m_per_axis,n_init,n_steps,sigma2,alpha,"
         "method,n_effective,reject_rate,reject_se,coverage_rate,coverage_se,"
         "ci_length_median,ci_length_q90\n";
}

std::string aggregate_csv_rows(const std::vector<AggregateRow>& rows) {
  std::string out;
  for (const AggregateRow& row : rows) {
    out += row.algorithm;
    out += ',';
    out += row.rule;
    out += ',';
    out += row.family;
    out += ',';
    out += fmt(row.amplitude);
    out += ',';
    out += std::to_string(row.dim);
    out += ',';
    out += std::to_string(row.m_per_axis);
    out += ',';
    out += std::to_string(row.n_init);
    out += ',';
    out += std::to_string(row.n_steps);
    out += ',';
    out += fmt(row.sigma2);
    out += ',';
    out += fmt(row.alpha);
    out += ',';
    out += row.method;
    out += ',';
    out += std::to_string(row.n_effective);
    out += ',';
    out += fmt(row.reject_rate);
    out += ',';
    out += fmt(row.reject_se);
    out += ',';
    out += fmt(row.coverage_rate);
    out += ',';
    out += fmt(row.coverage_se);
    out += ',';
    out += fmt(row.ci_length_median);
    out += ',';
    out += fmt(row.ci_length_q90);
    out += '\n';
  }
  return out;
}

KsResult uniformity_check(std::vector<double> pvalues, double significance) {
  if (pvalues.empty()) throw ConfigError("uniformity_check: empty sample");
  std::sort(pvalues.begin(), pvalues.end());
  const double n = static_cast<double>(pvalues.size());
  double d = 0.0;
  for (std::size_t i = 0; i < pvalues.size(); ++i) {
    const double p = std::min(1.0, std::max(0.0, pvalues[i]));
    d = std::max(d, (i + 1) / n - p);
    d = std::max(d, p - i / n);
  }
  KsResult result;
  result.statistic = d;
  // Asymptotic Kolmogorov critical value sqrt(-ln(a/2)/2)/sqrt(n).
  result.critical = std::sqrt(-0.5 * std::log(significance / 2.0)) / std::sqrt(n);
  result.pass = d < result.critical;
  return result;
}

}  // namespace postadc
