#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "postadc/adc.hpp"
#include "postadc/candidates.hpp"

namespace postadc {

enum class TargetRule {
  HighLowRegion,
  TopN,
  WinnerRunnerUp,
  FixedRegion,
  GpMeanAtPoint,
};

TargetRule parse_target_rule(const std::string& name);
std::string target_rule_name(TargetRule rule);

//! Parameters of a target rule, fixed before the data are seen.
struct TargetSpec {
  TargetRule rule = TargetRule::HighLowRegion;
  double window_side = 0.0;          // high_low_region
  int top_n = 1;                     // top_n
  Eigen::VectorXd region_lo;         // fixed_region box corners
  Eigen::VectorXd region_hi;
  Eigen::VectorXd target_point;      // gp_mean_at_point
  GpUcbConfig gp;                    // kernel for gp_mean_at_point
};

//! The realized data-driven target: the weight vector eta defining
//! Delta = eta' mu, plus the selected index sets the event conditions on.
struct TargetDescriptor {
  TargetSpec spec;
  std::vector<int> set_i;  // I (high / top / winner) where applicable
  std::vector<int> set_j;  // J (low / runner-up) where applicable
  Eigen::VectorXd eta;
};

//! High-vs-low sliding-window selection: I maximizes and J minimizes the
//! window sample mean (ties to the lexicographically smallest member set).
TargetDescriptor select_high_low(const Eigen::MatrixXd& trajectory_points,
                                 const Eigen::Ref<const Eigen::VectorXd>& y,
                                 double side);

//! eta = (1/n) on the indices of the n largest responses.
TargetDescriptor select_top_n(const Eigen::Ref<const Eigen::VectorXd>& y,
                              int n);

//! eta = e_winner - e_runner_up.
TargetDescriptor select_winner_runner_up(
    const Eigen::Ref<const Eigen::VectorXd>& y);

//! Mean over queried points falling in a pre-specified box.
TargetDescriptor fixed_region_eta(const Eigen::MatrixXd& trajectory_points,
                                  const Eigen::VectorXd& region_lo,
                                  const Eigen::VectorXd& region_hi);

//! GP posterior mean weights at a target location,
//! eta = (K_N + sigma^2 I)^{-1} k_N(x0).
TargetDescriptor gp_mean_eta(const Eigen::MatrixXd& trajectory_points,
                             const Eigen::VectorXd& target_point,
                             const GpUcbConfig& config);

//! Dispatch on spec.rule. y is ignored by the data-independent rules.
TargetDescriptor select_target(const TargetSpec& spec,
                               const Eigen::MatrixXd& trajectory_points,
                               const Eigen::Ref<const Eigen::VectorXd>& y);

//! True when the two descriptors encode the same selection outcome.
bool same_selection(const TargetDescriptor& a, const TargetDescriptor& b);

}  // namespace postadc
