#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "postadc/adc.hpp"
#include "postadc/constraint.hpp"
#include "postadc/interval_set.hpp"
#include "postadc/targets.hpp"

namespace postadc {

//! One-dimensional slice through the observed responses: every response
//! vector consistent with the conditioning is a + b z with z the value of
//! the test statistic.
struct LineSlice {
  Eigen::VectorXd a;  // nuisance residual
  Eigen::VectorXd b;  // direction, eta' b = 1
  double v_eta = 0.0;  // variance of the statistic
  double t_obs = 0.0;  // observed statistic value
};

//! For isotropic response covariance sigma2 I:
//! b = eta / |eta|^2, a = y - b (eta' y), v = sigma2 |eta|^2.
LineSlice compute_line(const Eigen::VectorXd& eta, double sigma2,
                       const Eigen::Ref<const Eigen::VectorXd>& y);

//! A complete observed run: collected data plus the realized target.
struct ObservedRun {
  CollectedData data;
  TargetDescriptor target;

  Eigen::MatrixXd trajectory_points(const CandidateSet& candidates) const;
};

//! Constraints under which the acquisition rule reproduces the observed
//! trajectory along the slice (all acquisition steps).
std::vector<LinearConstraint> trajectory_constraints(
    const TrajectoryModel& model, const CandidateSet& candidates,
    const std::vector<int>& trajectory, int initial_count,
    const LineSlice& line, const Eigen::VectorXd& y_obs);

std::vector<LinearConstraint> gpucb_constraints(
    const CandidateSet& candidates, const std::vector<int>& trajectory,
    const GpUcbConfig& config, int initial_count, const LineSlice& line);

std::vector<LinearConstraint> tpe_constraints(
    const CandidateSet& candidates, const std::vector<int>& trajectory,
    const Eigen::VectorXd& y_obs, const TpeConfig& config, int initial_count,
    const LineSlice& line);

//! Constraints under which the target rule reproduces the observed
//! selected sets along the slice. Data-independent rules contribute none.
std::vector<LinearConstraint> target_constraints(
    const TargetDescriptor& target, const Eigen::MatrixXd& trajectory_points,
    const LineSlice& line);

//! Throws VerificationError unless every constraint holds at t_obs
//! within tol.
void check_constraints_at(const std::vector<LinearConstraint>& constraints,
                          double t_obs, double tol = 1e-8);

//! Intersects the half-lines into a single interval containing t_obs.
//! Constraints with |d_coef| <= 1e-12 are checked as constants.
IntervalSet solve_constraints(const std::vector<LinearConstraint>& constraints,
                              double t_obs);

//! Which constraint families enter the conditioning.
enum class ConditioningMask { Full, TrajectoryOnly, TargetOnly };

//! The truncation set of the observed selection event along the slice.
IntervalSet truncation_set(const TrajectoryModel& model,
                           const CandidateSet& candidates,
                           const ObservedRun& run, const LineSlice& line,
                           ConditioningMask mask = ConditioningMask::Full);

//! For each z in z_grid, replays collection and target selection on
//! a + b z and reports whether the full selection event (trajectory,
//! partition state where applicable, selected sets) matches the observed
//! one. Independent of the constraint path; used to validate Z.
std::vector<char> scan_oracle(const TrajectoryModel& model,
                              const CandidateSet& candidates,
                              const ObservedRun& run, const LineSlice& line,
                              const std::vector<double>& z_grid);

//! Delimited dump, one constraint per line: c,d_coef,sense,tag.
std::string format_constraints(
    const std::vector<LinearConstraint>& constraints);

}  // namespace postadc
