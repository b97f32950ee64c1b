#include "postadc/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <tuple>

#include "postadc/errors.hpp"

namespace postadc {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kSlopeTol = 1e-12;
constexpr double kConsistencyTol = 1e-8;

bool sense_is_upper(Sense s) { return s == Sense::LE || s == Sense::LT; }

// Signed violation of "c + d z (sense) 0" at z; positive means violated.
double violation_at(const LinearConstraint& lc, double z) {
  const double value = lc.c + lc.d_coef * z;
  return sense_is_upper(lc.sense) ? value : -value;
}

double mean_over(const Eigen::Ref<const Eigen::VectorXd>& v,
                 const std::vector<int>& steps) {
  double s = 0.0;
  for (int t : steps) s += v[t];
  return s / static_cast<double>(steps.size());
}

void push_order_constraint(int i, int j, const LineSlice& line,
                           const std::string& tag,
                           std::vector<LinearConstraint>& out) {
  out.push_back(LinearConstraint{line.a[i] - line.a[j],
                                 line.b[i] - line.b[j], Sense::GE, tag});
}

}  // namespace

LineSlice compute_line(const Eigen::VectorXd& eta, double sigma2,
                       const Eigen::Ref<const Eigen::VectorXd>& y) {
  const double norm2 = eta.squaredNorm();
  if (!(norm2 > 0.0)) throw DegenerateSelection("compute_line: eta is zero");
  if (!(sigma2 > 0.0)) throw ConfigError("compute_line: sigma2 must be > 0");

  LineSlice line;
  line.t_obs = eta.dot(y);
  line.v_eta = sigma2 * norm2;
  line.b = eta / norm2;
  line.a = y - line.b * line.t_obs;
  return line;
}

Eigen::MatrixXd ObservedRun::trajectory_points(
    const CandidateSet& candidates) const {
  const int n = data.total();
  Eigen::MatrixXd pts(n, candidates.dim);
  for (int t = 0; t < n; ++t) {
    pts.row(t) = candidates.points.row(data.trajectory[t]);
  }
  return pts;
}

std::vector<LinearConstraint> trajectory_constraints(
    const TrajectoryModel& model, const CandidateSet& candidates,
    const std::vector<int>& trajectory, int initial_count,
    const LineSlice& line, const Eigen::VectorXd& y_obs) {
  std::vector<LinearConstraint> out;
  const int total = static_cast<int>(trajectory.size());
  for (int n = initial_count; n < total; ++n) {
    model.step_constraints(candidates, trajectory, n, line.a, line.b, y_obs,
                           out);
  }
  check_constraints_at(out, line.t_obs);
  return out;
}

std::vector<LinearConstraint> gpucb_constraints(
    const CandidateSet& candidates, const std::vector<int>& trajectory,
    const GpUcbConfig& config, int initial_count, const LineSlice& line) {
  const GpUcbModel model(config);
  const Eigen::VectorXd y_obs = line.a + line.b * line.t_obs;
  return trajectory_constraints(model, candidates, trajectory, initial_count,
                                line, y_obs);
}

std::vector<LinearConstraint> tpe_constraints(
    const CandidateSet& candidates, const std::vector<int>& trajectory,
    const Eigen::VectorXd& y_obs, const TpeConfig& config, int initial_count,
    const LineSlice& line) {
  const TpeModel model(config);
  return trajectory_constraints(model, candidates, trajectory, initial_count,
                                line, y_obs);
}

std::vector<LinearConstraint> target_constraints(
    const TargetDescriptor& target, const Eigen::MatrixXd& trajectory_points,
    const LineSlice& line) {
  std::vector<LinearConstraint> out;
  const int total = static_cast<int>(trajectory_points.rows());

  switch (target.spec.rule) {
    case TargetRule::HighLowRegion: {
      const std::vector<Window> windows =
          enumerate_windows(trajectory_points, target.spec.window_side);
      std::set<std::pair<double, double>> seen;
      auto emit = [&](const std::vector<int>& hi, const std::vector<int>& lo,
                      const std::string& tag) {
        LinearConstraint lc;
        lc.c = mean_over(line.a, hi) - mean_over(line.a, lo);
        lc.d_coef = mean_over(line.b, hi) - mean_over(line.b, lo);
        lc.sense = Sense::GE;
        lc.tag = tag;
        if (seen.insert({lc.c, lc.d_coef}).second) {
          out.push_back(std::move(lc));
        }
      };
      for (int w = 0; w < static_cast<int>(windows.size()); ++w) {
        if (windows[w].steps != target.set_i) {
          emit(target.set_i, windows[w].steps,
               "target high>=win" + std::to_string(w));
        }
        if (windows[w].steps != target.set_j) {
          emit(windows[w].steps, target.set_j,
               "target win" + std::to_string(w) + ">=low");
        }
      }
      break;
    }
    case TargetRule::TopN: {
      std::vector<char> in_set(total, 0);
      for (int t : target.set_i) in_set[t] = 1;
      for (int i : target.set_i) {
        for (int j = 0; j < total; ++j) {
          if (in_set[j]) continue;
          push_order_constraint(i, j, line,
                                "target top " + std::to_string(i) + ">=" +
                                    std::to_string(j),
                                out);
        }
      }
      break;
    }
    case TargetRule::WinnerRunnerUp: {
      const int winner = target.set_i.front();
      const int runner = target.set_j.front();
      for (int t = 0; t < total; ++t) {
        if (t == winner) continue;
        push_order_constraint(winner, t, line,
                              "target winner>=" + std::to_string(t), out);
      }
      for (int t = 0; t < total; ++t) {
        if (t == winner || t == runner) continue;
        push_order_constraint(runner, t, line,
                              "target runner>=" + std::to_string(t), out);
      }
      break;
    }
    case TargetRule::FixedRegion:
    case TargetRule::GpMeanAtPoint:
      // Data-independent given the trajectory: the event reduces to the
      // trajectory event and contributes no constraints.
      break;
  }
  check_constraints_at(out, line.t_obs);
  return out;
}

void check_constraints_at(const std::vector<LinearConstraint>& constraints,
                          double t_obs, double tol) {
  for (const LinearConstraint& lc : constraints) {
    if (violation_at(lc, t_obs) > tol) {
      throw VerificationError("constraint violated at t_obs: " + lc.tag);
    }
  }
}

IntervalSet solve_constraints(const std::vector<LinearConstraint>& constraints,
                              double t_obs) {
  double lo = -kInf, hi = kInf;
  bool lo_open = false, hi_open = false;

  for (const LinearConstraint& lc : constraints) {
    const bool strict = lc.sense == Sense::LT || lc.sense == Sense::GT;
    if (std::fabs(lc.d_coef) <= kSlopeTol) {
      if (violation_at(lc, 0.0) > kConsistencyTol) {
        throw VerificationError("constant constraint violated: " + lc.tag);
      }
      continue;
    }
    const double bound = -lc.c / lc.d_coef;
    // c + d z <= 0 caps z above when d > 0 and below when d < 0;
    // >= senses mirror that.
    const bool upper = sense_is_upper(lc.sense) == (lc.d_coef > 0.0);
    if (upper) {
      if (bound < hi || (bound == hi && strict)) {
        hi = bound;
        hi_open = strict;
      }
    } else {
      if (bound > lo || (bound == lo && strict)) {
        lo = bound;
        lo_open = strict;
      }
    }
  }

  if (!(lo < hi)) {
    throw VerificationError("solve_constraints: empty truncation set");
  }
  if (t_obs < lo - kConsistencyTol || t_obs > hi + kConsistencyTol) {
    throw VerificationError(
        "solve_constraints: observed statistic outside truncation set");
  }
  return IntervalSet::single(lo, hi, lo_open, hi_open);
}

IntervalSet truncation_set(const TrajectoryModel& model,
                           const CandidateSet& candidates,
                           const ObservedRun& run, const LineSlice& line,
                           ConditioningMask mask) {
  std::vector<LinearConstraint> constraints;
  if (mask != ConditioningMask::TargetOnly) {
    auto tc = trajectory_constraints(model, candidates, run.data.trajectory,
                                     run.data.n_init, line, run.data.y);
    constraints.insert(constraints.end(), std::make_move_iterator(tc.begin()),
                       std::make_move_iterator(tc.end()));
  }
  if (mask != ConditioningMask::TrajectoryOnly) {
    auto gc = target_constraints(run.target, run.trajectory_points(candidates),
                                 line);
    constraints.insert(constraints.end(), std::make_move_iterator(gc.begin()),
                       std::make_move_iterator(gc.end()));
  }
  return solve_constraints(constraints, line.t_obs);
}

std::vector<char> scan_oracle(const TrajectoryModel& model,
                              const CandidateSet& candidates,
                              const ObservedRun& run, const LineSlice& line,
                              const std::vector<double>& z_grid) {
  const int total = run.data.total();
  const int n_init = run.data.n_init;
  const auto scorer =
      model.make_prefix_scorer(candidates, run.data.trajectory, n_init);
  const auto aux_obs =
      model.auxiliary_event(run.data.trajectory, run.data.y, n_init);
  const Eigen::MatrixXd points = run.trajectory_points(candidates);

  std::vector<char> out(z_grid.size(), 0);
  Eigen::VectorXd y_z(total);
  for (std::size_t k = 0; k < z_grid.size(); ++k) {
    y_z = line.a + line.b * z_grid[k];

    bool match = true;
    for (int n = n_init; n < total && match; ++n) {
      match = scorer->next_index(n, y_z) == run.data.trajectory[n];
    }
    if (!match) continue;

    try {
      if (!aux_obs.empty() &&
          model.auxiliary_event(run.data.trajectory, y_z, n_init) != aux_obs) {
        continue;
      }
      const TargetDescriptor replayed =
          select_target(run.target.spec, points, y_z);
      out[k] = same_selection(replayed, run.target) ? 1 : 0;
    } catch (const DegenerateSelection&) {
      // A degenerate replay cannot reproduce the observed event.
    }
  }
  return out;
}

std::string format_constraints(
    const std::vector<LinearConstraint>& constraints) {
  std::string out = "c,d_coef,sense,tag\n";
  char buf[128];
  for (const LinearConstraint& lc : constraints) {
    std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%s,", lc.c, lc.d_coef,
                  sense_str(lc.sense));
    out += buf;
    out += lc.tag;
    out += '\n';
  }
  return out;
}

}  // namespace postadc
