#include "postadc/targets.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "postadc/errors.hpp"

namespace postadc {

namespace {

constexpr double kZeroEtaTol = 1e-12;

double mean_over(const Eigen::Ref<const Eigen::VectorXd>& y,
                 const std::vector<int>& steps) {
  double s = 0.0;
  for (int t : steps) s += y[t];
  return s / static_cast<double>(steps.size());
}

void check_eta_nonzero(const Eigen::VectorXd& eta) {
  if (eta.lpNorm<Eigen::Infinity>() < kZeroEtaTol) {
    throw DegenerateSelection("selected weight vector is zero to tolerance");
  }
}

}  // namespace

TargetRule parse_target_rule(const std::string& name) {
  if (name == "high_low_region" || name == "high_low") {
    return TargetRule::HighLowRegion;
  }
  if (name == "top_n") return TargetRule::TopN;
  if (name == "winner_runner_up") return TargetRule::WinnerRunnerUp;
  if (name == "fixed_region") return TargetRule::FixedRegion;
  if (name == "gp_mean_at_point" || name == "gp_mean") {
    return TargetRule::GpMeanAtPoint;
  }
  throw ConfigError("unknown target rule: " + name);
}

std::string target_rule_name(TargetRule rule) {
  switch (rule) {
    case TargetRule::HighLowRegion: return "high_low_region";
    case TargetRule::TopN: return "top_n";
    case TargetRule::WinnerRunnerUp: return "winner_runner_up";
    case TargetRule::FixedRegion: return "fixed_region";
    case TargetRule::GpMeanAtPoint: return "gp_mean_at_point";
  }
  return "?";
}

TargetDescriptor select_high_low(const Eigen::MatrixXd& trajectory_points,
                                 const Eigen::Ref<const Eigen::VectorXd>& y,
                                 double side) {
  const std::vector<Window> windows =
      enumerate_windows(trajectory_points, side);
  if (windows.size() < 2) {
    throw DegenerateSelection("select_high_low: fewer than two windows");
  }

  // Windows arrive sorted by member set, so scanning in order with strict
  // comparisons realizes the lexicographic tie rule.
  int best = 0, worst = 0;
  double best_mean = mean_over(y, windows[0].steps);
  double worst_mean = best_mean;
  for (int w = 1; w < static_cast<int>(windows.size()); ++w) {
    const double m = mean_over(y, windows[w].steps);
    if (m > best_mean) {
      best_mean = m;
      best = w;
    }
    if (m < worst_mean) {
      worst_mean = m;
      worst = w;
    }
  }
  if (windows[best].steps == windows[worst].steps) {
    throw DegenerateSelection("select_high_low: high and low regions agree");
  }

  TargetDescriptor out;
  out.spec.rule = TargetRule::HighLowRegion;
  out.spec.window_side = side;
  out.set_i = windows[best].steps;
  out.set_j = windows[worst].steps;
  out.eta = Eigen::VectorXd::Zero(y.size());
  for (int t : out.set_i) out.eta[t] += 1.0 / out.set_i.size();
  for (int t : out.set_j) out.eta[t] -= 1.0 / out.set_j.size();
  check_eta_nonzero(out.eta);
  return out;
}

TargetDescriptor select_top_n(const Eigen::Ref<const Eigen::VectorXd>& y,
                              int n) {
  const int total = static_cast<int>(y.size());
  if (n < 1 || n > total) throw ConfigError("select_top_n: n out of range");

  std::vector<int> order(total);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    if (y[a] != y[b]) return y[a] > y[b];
    return a < b;
  });

  TargetDescriptor out;
  out.spec.rule = TargetRule::TopN;
  out.spec.top_n = n;
  out.set_i.assign(order.begin(), order.begin() + n);
  std::sort(out.set_i.begin(), out.set_i.end());
  out.eta = Eigen::VectorXd::Zero(total);
  for (int t : out.set_i) out.eta[t] = 1.0 / n;
  return out;
}

TargetDescriptor select_winner_runner_up(
    const Eigen::Ref<const Eigen::VectorXd>& y) {
  const int total = static_cast<int>(y.size());
  if (total < 2) throw ConfigError("select_winner_runner_up: need N >= 2");

  int winner = 0;
  for (int t = 1; t < total; ++t) {
    if (y[t] > y[winner]) winner = t;
  }
  int runner = winner == 0 ? 1 : 0;
  for (int t = 0; t < total; ++t) {
    if (t == winner) continue;
    if (y[t] > y[runner]) runner = t;
  }

  TargetDescriptor out;
  out.spec.rule = TargetRule::WinnerRunnerUp;
  out.set_i = {winner};
  out.set_j = {runner};
  out.eta = Eigen::VectorXd::Zero(total);
  out.eta[winner] = 1.0;
  out.eta[runner] = -1.0;
  return out;
}

TargetDescriptor fixed_region_eta(const Eigen::MatrixXd& trajectory_points,
                                  const Eigen::VectorXd& region_lo,
                                  const Eigen::VectorXd& region_hi) {
  const int total = static_cast<int>(trajectory_points.rows());
  const int d = static_cast<int>(trajectory_points.cols());
  if (region_lo.size() != d || region_hi.size() != d) {
    throw ConfigError("fixed_region_eta: region dimension mismatch");
  }

  TargetDescriptor out;
  out.spec.rule = TargetRule::FixedRegion;
  out.spec.region_lo = region_lo;
  out.spec.region_hi = region_hi;
  for (int t = 0; t < total; ++t) {
    bool inside = true;
    for (int j = 0; j < d; ++j) {
      const double x = trajectory_points(t, j);
      if (x < region_lo[j] || x > region_hi[j]) {
        inside = false;
        break;
      }
    }
    if (inside) out.set_i.push_back(t);
  }
  if (out.set_i.empty()) {
    throw DegenerateSelection("fixed_region_eta: no queried point in region");
  }
  out.eta = Eigen::VectorXd::Zero(total);
  for (int t : out.set_i) out.eta[t] = 1.0 / out.set_i.size();
  return out;
}

TargetDescriptor gp_mean_eta(const Eigen::MatrixXd& trajectory_points,
                             const Eigen::VectorXd& target_point,
                             const GpUcbConfig& config) {
  Eigen::MatrixXd single(1, target_point.size());
  single.row(0) = target_point.transpose();
  const GpStepCoefficients coef =
      gp_step_coefficients(trajectory_points, single, config);

  TargetDescriptor out;
  out.spec.rule = TargetRule::GpMeanAtPoint;
  out.spec.target_point = target_point;
  out.spec.gp = config;
  out.eta = coef.weights.row(0).transpose();
  check_eta_nonzero(out.eta);
  return out;
}

TargetDescriptor select_target(const TargetSpec& spec,
                               const Eigen::MatrixXd& trajectory_points,
                               const Eigen::Ref<const Eigen::VectorXd>& y) {
  TargetDescriptor out;
  switch (spec.rule) {
    case TargetRule::HighLowRegion:
      out = select_high_low(trajectory_points, y, spec.window_side);
      break;
    case TargetRule::TopN:
      out = select_top_n(y, spec.top_n);
      break;
    case TargetRule::WinnerRunnerUp:
      out = select_winner_runner_up(y);
      break;
    case TargetRule::FixedRegion:
      out = fixed_region_eta(trajectory_points, spec.region_lo, spec.region_hi);
      break;
    case TargetRule::GpMeanAtPoint:
      out = gp_mean_eta(trajectory_points, spec.target_point, spec.gp);
      break;
  }
  out.spec = spec;
  return out;
}

bool same_selection(const TargetDescriptor& a, const TargetDescriptor& b) {
  return a.spec.rule == b.spec.rule && a.set_i == b.set_i && a.set_j == b.set_j;
}

}  // namespace postadc
