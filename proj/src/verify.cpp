#include "postadc/verify.hpp"

#include <cmath>
#include <cstdio>

#include "postadc/errors.hpp"
#include "postadc/geometry.hpp"
#include "postadc/objectives.hpp"
#include "postadc/rng.hpp"

namespace postadc {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

int ToyModel::next_index(const CandidateSet& /*candidates*/,
                         const std::vector<int>& queried,
                         const Eigen::Ref<const Eigen::VectorXd>& responses)
    const {
  if (queried.size() != 1) {
    throw ConfigError("ToyModel: only a single acquisition step exists");
  }
  return responses[0] < 0.0 ? 1 : 2;
}

void ToyModel::step_constraints(const CandidateSet& /*candidates*/,
                                const std::vector<int>& trajectory, int n,
                                const Eigen::VectorXd& line_a,
                                const Eigen::VectorXd& line_b,
                                const Eigen::VectorXd& /*y_obs*/,
                                std::vector<LinearConstraint>& out) const {
  if (n != 1) throw ConfigError("ToyModel: unexpected step index");
  LinearConstraint lc;
  lc.c = line_a[0];
  lc.d_coef = line_b[0];
  lc.sense = trajectory[1] == 1 ? Sense::LT : Sense::GE;
  lc.tag = "toy step=1";
  out.push_back(std::move(lc));
}

CandidateSet toy_candidates() {
  CandidateSet set;
  set.dim = 1;
  set.points.resize(3, 1);
  set.points << 0.0, 0.5, 1.0;
  return set;
}

ToyCheckReport toy_check(int draws, std::uint64_t seed) {
  const ToyModel model;
  const CandidateSet candidates = toy_candidates();
  SplitMix64 rng(seed);

  ToyCheckReport report;
  report.draws = draws;
  report.pass = true;

  for (int k = 0; k < draws; ++k) {
    const double y1 = rng.next_gaussian();
    const double y2 = rng.next_gaussian();

    ObservedRun run;
    run.data.n_init = 1;
    run.data.trajectory = {0, y1 < 0.0 ? 1 : 2};
    run.data.y.resize(2);
    run.data.y << y1, y2;

    TargetSpec spec;
    spec.rule = TargetRule::TopN;
    spec.top_n = 1;
    run.target =
        select_target(spec, run.trajectory_points(candidates), run.data.y);

    const LineSlice line = compute_line(run.target.eta, 1.0, run.data.y);
    const IntervalSet z = truncation_set(model, candidates, run, line);

    const bool winner_second = run.target.set_i.front() == 1;
    double expect_lo, expect_hi;
    int branch;
    if (winner_second) {
      expect_lo = y1;
      expect_hi = kInf;
      branch = y1 < 0.0 ? 0 : 2;
    } else if (y1 < 0.0) {
      expect_lo = y2;
      expect_hi = 0.0;
      branch = 1;
    } else {
      expect_lo = std::max(0.0, y2);
      expect_hi = kInf;
      branch = 3;
    }
    ++report.branch_counts[branch];

    auto endpoint_error = [](double got, double expected) {
      if (std::isinf(expected) || std::isinf(got)) {
        return got == expected ? 0.0 : kInf;
      }
      return std::fabs(got - expected);
    };
    const double err =
        std::max(endpoint_error(z.hull_lo(), expect_lo),
                 endpoint_error(z.hull_hi(), expect_hi));
    report.max_endpoint_error = std::max(report.max_endpoint_error, err);
    if (!(err <= 1e-12) || z.size() != 1) {
      report.pass = false;
      if (report.detail.empty()) {
        char buf[160];
        std::snprintf(buf, sizeof(buf),
                      "draw %d branch %d: got %s, expected [%g, %g]", k,
                      branch, z.str().c_str(), expect_lo, expect_hi);
        report.detail = buf;
      }
    }
  }

  for (int b = 0; b < 4; ++b) {
    if (report.branch_counts[b] == 0) {
      report.pass = false;
      report.detail += " branch " + std::to_string(b) + " never drawn;";
    }
  }
  return report;
}

ScanVerifyReport scan_verify(const ExperimentConfig& config, int instances,
                             int grid_points, bool corrupt_constraint) {
  const CandidateSet candidates = make_grid(config.dim, config.m_per_axis);
  const int total = config.n_init + config.n_steps;
  if (candidates.size() > 64 || total > 20) {
    throw ConfigError("scan_verify: instance too large (M <= 64, N <= 20)");
  }
  const Eigen::VectorXd mu = synth_objective(config.objective, candidates);
  const auto model = make_model(config.algorithm, config.gp, config.tpe);

  ScanVerifyReport report;
  const int max_attempts = 10 * instances;
  for (int attempt = 0; attempt < max_attempts && report.instances < instances;
       ++attempt) {
    const std::uint64_t rep_seed = mix_seed(config.master_seed, attempt);
    SplitMix64 noise_rng(mix_seed(rep_seed, 2));
    Eigen::VectorXd eps(total);
    for (int t = 0; t < total; ++t) {
      eps[t] = std::sqrt(config.sigma2) * noise_rng.next_gaussian();
    }
    SyntheticSource source(mu, eps);

    ObservedRun run;
    run.data = run_adc(*model, source, candidates, config.n_init,
                       config.n_steps, mix_seed(rep_seed, 1));
    try {
      run.target = select_target(config.target,
                                 run.trajectory_points(candidates), run.data.y);
    } catch (const DegenerateSelection&) {
      ++report.degenerate_skips;
      continue;
    }
    ++report.instances;

    const LineSlice line =
        compute_line(run.target.eta, config.sigma2, run.data.y);
    IntervalSet z = truncation_set(*model, candidates, run, line);
    if (corrupt_constraint) {
      // collapse the set to a sliver around t_obs, as a missing or wrong
      // constraint would
      const double s = std::sqrt(line.v_eta);
      z = z.intersect(IntervalSet::single(line.t_obs - 1e-3 * s,
                                          line.t_obs + 1e-3 * s));
    }

    const double half_span = 8.0 * std::sqrt(line.v_eta);
    std::vector<double> grid(grid_points);
    for (int j = 0; j < grid_points; ++j) {
      grid[j] =
          line.t_obs + half_span * (2.0 * j / (grid_points - 1.0) - 1.0);
    }
    const std::vector<char> oracle =
        scan_oracle(*model, candidates, run, line, grid);

    for (int j = 0; j < grid_points; ++j) {
      if (z.distance_to_endpoint(grid[j]) <= 1e-9) continue;
      ++report.points_checked;
      const bool computed = z.contains(grid[j]);
      if (computed != static_cast<bool>(oracle[j])) {
        ++report.mismatches;
        if (report.detail.empty()) {
          char buf[200];
          std::snprintf(buf, sizeof(buf),
                        "instance seed %d z=%.12g computed=%d replay=%d Z=%s",
                        attempt, grid[j], computed ? 1 : 0, oracle[j] ? 1 : 0,
                        z.str().c_str());
          report.detail = buf;
        }
      }
    }
  }
  report.pass = report.mismatches == 0 && report.instances == instances;
  if (report.instances < instances && report.detail.empty()) {
    report.detail = "could not collect enough non-degenerate instances";
  }
  return report;
}

}  // namespace postadc
