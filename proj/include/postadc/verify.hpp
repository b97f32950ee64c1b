#pragma once

#include <array>
#include <cstdint>
#include <string>

#include "postadc/adc.hpp"
#include "postadc/config.hpp"

namespace postadc {

//! Three-candidate, two-step collection rule with closed-form truncation
//! sets: the first query is candidate 0, the second is candidate 1 when
//! the first response is negative and candidate 2 otherwise. The target
//! picks the larger of the two responses.
class ToyModel : public TrajectoryModel {
 public:
  int next_index(const CandidateSet& candidates,
                 const std::vector<int>& queried,
                 const Eigen::Ref<const Eigen::VectorXd>& responses)
      const override;

  void step_constraints(const CandidateSet& candidates,
                        const std::vector<int>& trajectory, int n,
                        const Eigen::VectorXd& line_a,
                        const Eigen::VectorXd& line_b,
                        const Eigen::VectorXd& y_obs,
                        std::vector<LinearConstraint>& out) const override;
};

CandidateSet toy_candidates();

struct ToyCheckReport {
  int draws = 0;
  std::array<int, 4> branch_counts{};  // (traj, eta) cells
  double max_endpoint_error = 0.0;
  bool pass = false;
  std::string detail;
};

//! Draws (y1, y2) pairs, computes the truncation set through the full
//! constraint machinery and compares it against the closed forms of each
//! selection branch, endpoint by endpoint.
ToyCheckReport toy_check(int draws, std::uint64_t seed);

struct ScanVerifyReport {
  int instances = 0;
  int points_checked = 0;
  int mismatches = 0;
  int degenerate_skips = 0;
  bool pass = false;
  std::string detail;
};

//! Runs random instances of the configured pipeline and compares the
//! computed truncation set against a full replay over a z grid spanning
//! t_obs +- 8 sqrt(v). Grid points within 1e-9 of an interval endpoint
//! are not scored. corrupt_constraint deliberately shrinks the computed
//! set first (negative control for the checker itself).
ScanVerifyReport scan_verify(const ExperimentConfig& config, int instances,
                             int grid_points, bool corrupt_constraint = false);

}  // namespace postadc
