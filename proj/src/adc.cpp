#include "postadc/adc.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "postadc/errors.hpp"
#include "postadc/rng.hpp"

namespace postadc {

namespace {

Eigen::MatrixXd gather_points(const CandidateSet& candidates,
                              const std::vector<int>& indices, int count) {
  Eigen::MatrixXd pts(count, candidates.dim);
  for (int i = 0; i < count; ++i) pts.row(i) = candidates.points.row(indices[i]);
  return pts;
}

int argmax_smallest_index(const Eigen::VectorXd& scores) {
  int best = 0;
  for (int i = 1; i < scores.size(); ++i) {
    if (scores[i] > scores[best]) best = i;
  }
  return best;
}

// Kernel sum means over the partition sets, the constant part of the
// density-ratio score once the partition is fixed.
std::pair<Eigen::VectorXd, Eigen::VectorXd> tpe_density_means(
    const Eigen::MatrixXd& history_points, const Eigen::MatrixXd& query_points,
    const std::vector<int>& high, const std::vector<int>& low,
    const TpeConfig& config) {
  const int m = static_cast<int>(query_points.rows());
  Eigen::VectorXd g = Eigen::VectorXd::Zero(m);
  Eigen::VectorXd l = Eigen::VectorXd::Zero(m);
  for (int i = 0; i < m; ++i) {
    const Eigen::VectorXd x = query_points.row(i).transpose();
    for (int t : high) {
      g[i] += rbf_kernel(x, history_points.row(t).transpose(), 1.0,
                         config.bandwidth);
    }
    for (int t : low) {
      l[i] += rbf_kernel(x, history_points.row(t).transpose(), 1.0,
                         config.bandwidth);
    }
  }
  g /= static_cast<double>(high.size());
  l /= static_cast<double>(low.size());
  return {std::move(g), std::move(l)};
}

}  // namespace

double rbf_kernel(const Eigen::Ref<const Eigen::VectorXd>& x,
                  const Eigen::Ref<const Eigen::VectorXd>& x2, double variance,
                  double length_scale) {
  if (!(length_scale > 0.0)) {
    throw ConfigError("rbf_kernel: length_scale must be > 0");
  }
  const double sq = (x - x2).squaredNorm();
  return variance * std::exp(-sq / (2.0 * length_scale * length_scale));
}

GpStepCoefficients gp_step_coefficients(const Eigen::MatrixXd& history_points,
                                        const Eigen::MatrixXd& query_points,
                                        const GpUcbConfig& config) {
  const int n = static_cast<int>(history_points.rows());
  const int m = static_cast<int>(query_points.rows());
  if (n == 0) throw ConfigError("gp_step_coefficients: empty history");

  Eigen::MatrixXd gram(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j <= i; ++j) {
      const double k =
          rbf_kernel(history_points.row(i).transpose(),
                     history_points.row(j).transpose(), config.kernel_variance,
                     config.length_scale);
      gram(i, j) = k;
      gram(j, i) = k;
    }
    gram(i, i) += config.noise_variance;
  }
  Eigen::LLT<Eigen::MatrixXd> llt(gram);
  if (llt.info() != Eigen::Success) {
    throw NumericalError("gp_step_coefficients: factorization failed at step " +
                         std::to_string(n));
  }

  Eigen::MatrixXd cross(n, m);
  for (int j = 0; j < m; ++j) {
    for (int i = 0; i < n; ++i) {
      cross(i, j) = rbf_kernel(query_points.row(j).transpose(),
                               history_points.row(i).transpose(),
                               config.kernel_variance, config.length_scale);
    }
  }

  GpStepCoefficients out;
  out.weights = llt.solve(cross).transpose();  // M x n
  out.sd.resize(m);
  for (int j = 0; j < m; ++j) {
    double var = config.kernel_variance - out.weights.row(j).dot(cross.col(j));
    if (var < 0.0) var = 0.0;  // round-off clamp, tolerance 1e-12
    out.sd[j] = std::sqrt(var);
  }
  return out;
}

std::pair<double, double> gp_posterior(
    const Eigen::MatrixXd& history_points,
    const Eigen::Ref<const Eigen::VectorXd>& y,
    const Eigen::Ref<const Eigen::VectorXd>& x, const GpUcbConfig& config) {
  Eigen::MatrixXd single(1, x.size());
  single.row(0) = x.transpose();
  const GpStepCoefficients coef =
      gp_step_coefficients(history_points, single, config);
  const double mean = coef.weights.row(0).dot(y);
  return {mean, coef.sd[0] * coef.sd[0]};
}

double gpucb_score(const Eigen::MatrixXd& history_points,
                   const Eigen::Ref<const Eigen::VectorXd>& y,
                   const Eigen::Ref<const Eigen::VectorXd>& x,
                   const GpUcbConfig& config) {
  const auto [mean, var] = gp_posterior(history_points, y, x, config);
  return mean + config.kappa * std::sqrt(var);
}

std::pair<std::vector<int>, std::vector<int>> tpe_partition(
    const Eigen::Ref<const Eigen::VectorXd>& y, double gamma) {
  const int n = static_cast<int>(y.size());
  if (n < 2) throw ConfigError("tpe_partition: need at least two responses");
  if (!(gamma > 0.0 && gamma < 1.0)) {
    throw ConfigError("tpe_partition: gamma must lie in (0,1)");
  }
  const int m = static_cast<int>(std::ceil(gamma * n));
  if (m >= n) {
    throw DegenerateSelection("tpe_partition: degenerate split, m_n >= n");
  }

  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    if (y[a] != y[b]) return y[a] > y[b];
    return a < b;
  });
  std::vector<int> high(order.begin(), order.begin() + m);
  std::vector<int> low(order.begin() + m, order.end());
  std::sort(high.begin(), high.end());
  std::sort(low.begin(), low.end());
  return {std::move(high), std::move(low)};
}

double tpe_score(const Eigen::MatrixXd& history_points,
                 const Eigen::Ref<const Eigen::VectorXd>& y,
                 const Eigen::Ref<const Eigen::VectorXd>& x,
                 const TpeConfig& config) {
  const auto [high, low] = tpe_partition(y, config.gamma);
  Eigen::MatrixXd single(1, x.size());
  single.row(0) = x.transpose();
  const auto [g, l] =
      tpe_density_means(history_points, single, high, low, config);
  return g[0] / l[0];
}

int GpUcbModel::next_index(const CandidateSet& candidates,
                           const std::vector<int>& queried,
                           const Eigen::Ref<const Eigen::VectorXd>& responses)
    const {
  const int n = static_cast<int>(queried.size());
  const Eigen::MatrixXd hist = gather_points(candidates, queried, n);
  const GpStepCoefficients coef =
      gp_step_coefficients(hist, candidates.points, config_);
  const Eigen::VectorXd scores =
      coef.weights * responses.head(n) + config_.kappa * coef.sd;
  return argmax_smallest_index(scores);
}

void GpUcbModel::step_constraints(const CandidateSet& candidates,
                                  const std::vector<int>& trajectory, int n,
                                  const Eigen::VectorXd& line_a,
                                  const Eigen::VectorXd& line_b,
                                  const Eigen::VectorXd& /*y_obs*/,
                                  std::vector<LinearConstraint>& out) const {
  const Eigen::MatrixXd hist = gather_points(candidates, trajectory, n);
  const GpStepCoefficients coef =
      gp_step_coefficients(hist, candidates.points, config_);
  const int chosen = trajectory[n];
  const Eigen::VectorXd a_n = line_a.head(n);
  const Eigen::VectorXd b_n = line_b.head(n);
  const double chosen_c =
      coef.weights.row(chosen).dot(a_n) + config_.kappa * coef.sd[chosen];
  const double chosen_d = coef.weights.row(chosen).dot(b_n);

  for (int i = 0; i < candidates.size(); ++i) {
    if (i == chosen) continue;
    if (candidates.points.row(i) == candidates.points.row(chosen)) continue;
    LinearConstraint lc;
    lc.c = coef.weights.row(i).dot(a_n) + config_.kappa * coef.sd[i] - chosen_c;
    lc.d_coef = coef.weights.row(i).dot(b_n) - chosen_d;
    lc.sense = Sense::LE;
    lc.tag = "gpucb step=" + std::to_string(n) + " cand=" + std::to_string(i);
    out.push_back(std::move(lc));
  }
}

int TpeModel::next_index(const CandidateSet& candidates,
                         const std::vector<int>& queried,
                         const Eigen::Ref<const Eigen::VectorXd>& responses)
    const {
  const int n = static_cast<int>(queried.size());
  const Eigen::MatrixXd hist = gather_points(candidates, queried, n);
  const auto [high, low] = tpe_partition(responses.head(n), config_.gamma);
  const auto [g, l] =
      tpe_density_means(hist, candidates.points, high, low, config_);
  const Eigen::VectorXd scores = g.cwiseQuotient(l);
  return argmax_smallest_index(scores);
}

void TpeModel::step_constraints(const CandidateSet& candidates,
                                const std::vector<int>& trajectory, int n,
                                const Eigen::VectorXd& line_a,
                                const Eigen::VectorXd& line_b,
                                const Eigen::VectorXd& y_obs,
                                std::vector<LinearConstraint>& out) const {
  const auto [high, low] = tpe_partition(y_obs.head(n), config_.gamma);

  // Fixing the partition makes the score comparison constant in z; a
  // violated comparison means the trajectory was not produced by this
  // rule and configuration.
  const Eigen::MatrixXd hist = gather_points(candidates, trajectory, n);
  const auto [g, l] =
      tpe_density_means(hist, candidates.points, high, low, config_);
  const int chosen = trajectory[n];
  for (int i = 0; i < candidates.size(); ++i) {
    if (i == chosen) continue;
    if (candidates.points.row(i) == candidates.points.row(chosen)) continue;
    const double lhs = g[i] * l[chosen];
    const double rhs = g[chosen] * l[i];
    const double tol = 1e-9 * std::max(lhs, rhs);
    if (lhs > rhs + tol) {
      throw VerificationError(
          "tpe step_constraints: constant score comparison violated at step " +
          std::to_string(n) + " candidate " + std::to_string(i));
    }
  }

  for (int i : high) {
    for (int j : low) {
      LinearConstraint lc;
      lc.c = line_a[i] - line_a[j];
      lc.d_coef = line_b[i] - line_b[j];
      lc.sense = Sense::GE;
      lc.tag = "tpe step=" + std::to_string(n) + " part " + std::to_string(i) +
               ">=" + std::to_string(j);
      out.push_back(std::move(lc));
    }
  }
}

std::vector<std::vector<int>> TpeModel::auxiliary_event(
    const std::vector<int>& /*trajectory*/,
    const Eigen::Ref<const Eigen::VectorXd>& responses,
    int initial_count) const {
  std::vector<std::vector<int>> partitions;
  const int total = static_cast<int>(responses.size());
  for (int n = initial_count; n < total; ++n) {
    partitions.push_back(tpe_partition(responses.head(n), config_.gamma).first);
  }
  return partitions;
}

namespace {

class GenericPrefixScorer : public PrefixScorer {
 public:
  GenericPrefixScorer(const TrajectoryModel& model,
                      const CandidateSet& candidates,
                      std::vector<int> trajectory)
      : model_(model), candidates_(candidates),
        trajectory_(std::move(trajectory)) {}

  int next_index(int n, const Eigen::Ref<const Eigen::VectorXd>& responses)
      const override {
    const std::vector<int> prefix(trajectory_.begin(),
                                  trajectory_.begin() + n);
    return model_.next_index(candidates_, prefix, responses);
  }

 private:
  const TrajectoryModel& model_;
  const CandidateSet& candidates_;
  std::vector<int> trajectory_;
};

class GpUcbPrefixScorer : public PrefixScorer {
 public:
  GpUcbPrefixScorer(const GpUcbConfig& config, const CandidateSet& candidates,
                    const std::vector<int>& trajectory, int initial_count) {
    const int total = static_cast<int>(trajectory.size());
    steps_.resize(total + 1);
    kappa_ = config.kappa;
    for (int n = initial_count; n < total; ++n) {
      steps_[n] = gp_step_coefficients(gather_points(candidates, trajectory, n),
                                       candidates.points, config);
    }
  }

  int next_index(int n, const Eigen::Ref<const Eigen::VectorXd>& responses)
      const override {
    const Eigen::VectorXd scores =
        steps_[n].weights * responses.head(n) + kappa_ * steps_[n].sd;
    return argmax_smallest_index(scores);
  }

 private:
  std::vector<GpStepCoefficients> steps_;
  double kappa_ = 0.0;
};

class TpePrefixScorer : public PrefixScorer {
 public:
  TpePrefixScorer(const TpeConfig& config, const CandidateSet& candidates,
                  const std::vector<int>& trajectory)
      : gamma_(config.gamma) {
    const int total = static_cast<int>(trajectory.size());
    const int m = candidates.size();
    kernel_.resize(m, total);
    for (int t = 0; t < total; ++t) {
      const Eigen::VectorXd xt = candidates.point(trajectory[t]);
      for (int i = 0; i < m; ++i) {
        kernel_(i, t) =
            rbf_kernel(candidates.point(i), xt, 1.0, config.bandwidth);
      }
    }
  }

  int next_index(int n, const Eigen::Ref<const Eigen::VectorXd>& responses)
      const override {
    const auto [high, low] = tpe_partition(responses.head(n), gamma_);
    Eigen::VectorXd g = Eigen::VectorXd::Zero(kernel_.rows());
    Eigen::VectorXd l = Eigen::VectorXd::Zero(kernel_.rows());
    for (int t : high) g += kernel_.col(t);
    for (int t : low) l += kernel_.col(t);
    g /= static_cast<double>(high.size());
    l /= static_cast<double>(low.size());
    return argmax_smallest_index(g.cwiseQuotient(l));
  }

 private:
  Eigen::MatrixXd kernel_;
  double gamma_;
};

}  // namespace

std::unique_ptr<PrefixScorer> TrajectoryModel::make_prefix_scorer(
    const CandidateSet& candidates, const std::vector<int>& trajectory,
    int /*initial_count*/) const {
  return std::make_unique<GenericPrefixScorer>(*this, candidates, trajectory);
}

std::unique_ptr<PrefixScorer> GpUcbModel::make_prefix_scorer(
    const CandidateSet& candidates, const std::vector<int>& trajectory,
    int initial_count) const {
  return std::make_unique<GpUcbPrefixScorer>(config_, candidates, trajectory,
                                             initial_count);
}

std::unique_ptr<PrefixScorer> TpeModel::make_prefix_scorer(
    const CandidateSet& candidates, const std::vector<int>& trajectory,
    int /*initial_count*/) const {
  return std::make_unique<TpePrefixScorer>(config_, candidates, trajectory);
}

std::unique_ptr<TrajectoryModel> make_model(Algorithm algorithm,
                                            const GpUcbConfig& gp,
                                            const TpeConfig& tpe) {
  if (algorithm == Algorithm::GpUcb) return std::make_unique<GpUcbModel>(gp);
  return std::make_unique<TpeModel>(tpe);
}

CollectedData run_adc(const TrajectoryModel& model, ResponseSource& source,
                      const CandidateSet& candidates, int n_init, int n_steps,
                      std::uint64_t seed) {
  if (n_init < 1) throw ConfigError("run_adc: n_init must be >= 1");
  if (n_init + n_steps > candidates.size()) {
    throw ConfigError("run_adc: budget exceeds candidate count");
  }
  SplitMix64 rng(seed);
  const std::vector<int> initial =
      sample_without_replacement(candidates.size(), n_init, rng);
  return run_adc_from(model, source, candidates, initial, n_steps);
}

CollectedData run_adc_from(const TrajectoryModel& model,
                           ResponseSource& source,
                           const CandidateSet& candidates,
                           const std::vector<int>& initial_indices,
                           int n_steps) {
  const int n_init = static_cast<int>(initial_indices.size());
  const int total = n_init + n_steps;

  CollectedData data;
  data.n_init = n_init;
  data.trajectory = initial_indices;
  data.trajectory.reserve(total);
  data.y.resize(total);
  for (int t = 0; t < n_init; ++t) {
    data.y[t] = source.response(t, initial_indices[t]);
  }
  for (int t = n_init; t < total; ++t) {
    const int next =
        model.next_index(candidates, data.trajectory, data.y.head(t));
    data.trajectory.push_back(next);
    data.y[t] = source.response(t, next);
  }
  return data;
}

std::vector<int> replay_trajectory(
    const TrajectoryModel& model, const CandidateSet& candidates,
    const std::vector<int>& initial_indices,
    const Eigen::Ref<const Eigen::VectorXd>& y) {
  const int total = static_cast<int>(y.size());
  std::vector<int> trajectory = initial_indices;
  trajectory.reserve(total);
  for (int t = static_cast<int>(initial_indices.size()); t < total; ++t) {
    trajectory.push_back(model.next_index(candidates, trajectory, y.head(t)));
  }
  return trajectory;
}

}  // namespace postadc
