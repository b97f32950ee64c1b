#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <memory>
#include <utility>
#include <vector>

#include "postadc/candidates.hpp"
#include "postadc/constraint.hpp"

namespace postadc {

struct GpUcbConfig {
  double kernel_variance = 1.0;
  double length_scale = 0.1;
  double noise_variance = 1.0;
  double kappa = 2.0;
};

struct TpeConfig {
  double gamma = 0.2;
  double bandwidth = 0.1;
};

//! Queried indices and observed responses of one collection run.
struct CollectedData {
  std::vector<int> trajectory;  // candidate index per step, length N
  Eigen::VectorXd y;            // responses, length N
  int n_init = 0;

  int total() const { return static_cast<int>(trajectory.size()); }
};

//! Squared-exponential kernel: variance * exp(-|x-x2|^2 / (2 ls^2)).
double rbf_kernel(const Eigen::Ref<const Eigen::VectorXd>& x,
                  const Eigen::Ref<const Eigen::VectorXd>& x2, double variance,
                  double length_scale);

//! Per-step GP solve shared by scoring and by the selection geometry:
//! row i of weights is k_n(x_i)^T (K_n + sigma^2 I)^{-1}, so the posterior
//! mean at candidate i is weights.row(i) * y and the same row gives the
//! affine coefficients of the mean in the responses.
struct GpStepCoefficients {
  Eigen::MatrixXd weights;  // M x n
  Eigen::VectorXd sd;       // posterior standard deviation per candidate
};

GpStepCoefficients gp_step_coefficients(const Eigen::MatrixXd& history_points,
                                        const Eigen::MatrixXd& query_points,
                                        const GpUcbConfig& config);

//! Posterior mean and variance at a single point.
std::pair<double, double> gp_posterior(const Eigen::MatrixXd& history_points,
                                       const Eigen::Ref<const Eigen::VectorXd>& y,
                                       const Eigen::Ref<const Eigen::VectorXd>& x,
                                       const GpUcbConfig& config);

double gpucb_score(const Eigen::MatrixXd& history_points,
                   const Eigen::Ref<const Eigen::VectorXd>& y,
                   const Eigen::Ref<const Eigen::VectorXd>& x,
                   const GpUcbConfig& config);

//! Splits indices of y into the top ceil(gamma n) responses and the rest.
//! Ties enter the top set at the smaller index.
std::pair<std::vector<int>, std::vector<int>> tpe_partition(
    const Eigen::Ref<const Eigen::VectorXd>& y, double gamma);

double tpe_score(const Eigen::MatrixXd& history_points,
                 const Eigen::Ref<const Eigen::VectorXd>& y,
                 const Eigen::Ref<const Eigen::VectorXd>& x,
                 const TpeConfig& config);

//! Replays the argmax for histories that coincide with a prefix of a
//! reference trajectory, reusing per-step caches. Only meaningful while
//! the replayed prefix still equals the reference one.
class PrefixScorer {
 public:
  virtual ~PrefixScorer() = default;
  virtual int next_index(int n,
                         const Eigen::Ref<const Eigen::VectorXd>& responses)
      const = 0;
};

//! A deterministic acquisition rule together with the linear description
//! of its per-step selection event on a one-dimensional response slice.
class TrajectoryModel {
 public:
  virtual ~TrajectoryModel() = default;

  //! Argmax of the acquisition score over candidates given the history;
  //! ties resolve to the smallest candidate index.
  virtual int next_index(const CandidateSet& candidates,
                         const std::vector<int>& queried,
                         const Eigen::Ref<const Eigen::VectorXd>& responses)
      const = 0;

  //! Emits the constraints on z under which the rule, run on responses
  //! a + b z restricted to the first n steps, queries trajectory[n] again.
  //! y_obs is the realized response vector that produced the trajectory.
  virtual void step_constraints(const CandidateSet& candidates,
                                const std::vector<int>& trajectory, int n,
                                const Eigen::VectorXd& line_a,
                                const Eigen::VectorXd& line_b,
                                const Eigen::VectorXd& y_obs,
                                std::vector<LinearConstraint>& out) const = 0;

  //! Components of the conditioned event beyond the trajectory itself.
  //! The density-ratio rule fixes the per-step quantile partitions, so a
  //! replay must reproduce them; rules without such state return {}.
  virtual std::vector<std::vector<int>> auxiliary_event(
      const std::vector<int>& trajectory,
      const Eigen::Ref<const Eigen::VectorXd>& responses,
      int initial_count) const {
    (void)trajectory;
    (void)responses;
    (void)initial_count;
    return {};
  }

  //! Cached scorer for repeated replays along a slice. The default just
  //! forwards to next_index with the reference prefix.
  virtual std::unique_ptr<PrefixScorer> make_prefix_scorer(
      const CandidateSet& candidates, const std::vector<int>& trajectory,
      int initial_count) const;
};

class GpUcbModel : public TrajectoryModel {
 public:
  explicit GpUcbModel(GpUcbConfig config) : config_(config) {}

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

  std::unique_ptr<PrefixScorer> make_prefix_scorer(
      const CandidateSet& candidates, const std::vector<int>& trajectory,
      int initial_count) const override;

  const GpUcbConfig& config() const { return config_; }

 private:
  GpUcbConfig config_;
};

class TpeModel : public TrajectoryModel {
 public:
  explicit TpeModel(TpeConfig config) : config_(config) {}

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

  std::vector<std::vector<int>> auxiliary_event(
      const std::vector<int>& trajectory,
      const Eigen::Ref<const Eigen::VectorXd>& responses,
      int initial_count) const override;

  std::unique_ptr<PrefixScorer> make_prefix_scorer(
      const CandidateSet& candidates, const std::vector<int>& trajectory,
      int initial_count) const override;

  const TpeConfig& config() const { return config_; }

 private:
  TpeConfig config_;
};

enum class Algorithm { GpUcb, Tpe };

std::unique_ptr<TrajectoryModel> make_model(Algorithm algorithm,
                                            const GpUcbConfig& gp,
                                            const TpeConfig& tpe);

//! Supplies the response observed when a step queries a candidate.
class ResponseSource {
 public:
  virtual ~ResponseSource() = default;
  virtual double response(int step, int candidate_index) = 0;
};

class ReplaySource : public ResponseSource {
 public:
  explicit ReplaySource(Eigen::VectorXd y) : y_(std::move(y)) {}
  double response(int step, int) override { return y_[step]; }

 private:
  Eigen::VectorXd y_;
};

class SyntheticSource : public ResponseSource {
 public:
  SyntheticSource(Eigen::VectorXd mu, Eigen::VectorXd noise)
      : mu_(std::move(mu)), noise_(std::move(noise)) {}
  double response(int step, int candidate_index) override {
    return mu_[candidate_index] + noise_[step];
  }

 private:
  Eigen::VectorXd mu_;
  Eigen::VectorXd noise_;
};

//! Runs n_init uniform-without-replacement initial queries (seeded) and
//! then n_steps acquisition-maximizing queries.
CollectedData run_adc(const TrajectoryModel& model, ResponseSource& source,
                      const CandidateSet& candidates, int n_init, int n_steps,
                      std::uint64_t seed);

//! Same collection loop with the initial design fixed by the caller.
CollectedData run_adc_from(const TrajectoryModel& model,
                           ResponseSource& source,
                           const CandidateSet& candidates,
                           const std::vector<int>& initial_indices,
                           int n_steps);

//! Trajectory map H(y): queried sequence the rule produces when the
//! responses are read from y in query order.
std::vector<int> replay_trajectory(const TrajectoryModel& model,
                                   const CandidateSet& candidates,
                                   const std::vector<int>& initial_indices,
                                   const Eigen::Ref<const Eigen::VectorXd>& y);

}  // namespace postadc
