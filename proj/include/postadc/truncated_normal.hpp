#pragma once

#include <limits>
#include <string>
#include <utility>

#include "postadc/interval_set.hpp"

namespace postadc {

//! CDF at t of N(delta, v) truncated to Z. Interval masses are assembled
//! in log space from scaled-complementary-error-function tails, so the
//! ratio stays accurate when Z sits far from delta.
double tn_cdf(double delta, double v, const IntervalSet& z, double t);

//! Upper-tail selective p-value at the null boundary delta = 0.
double selective_p(double t_obs, double v, const IntervalSet& z);

//! Equal-tailed two-sided selective p-value, 2 min(G0, 1 - G0).
double selective_p_two_sided(double t_obs, double v, const IntervalSet& z);

//! Equal-tailed interval: delta values with alpha/2 <= G_delta(t_obs)
//! <= 1 - alpha/2, found by bracketing plus bisection on the monotone
//! map delta -> G_delta(t_obs). A bracket failure leaves that endpoint
//! unbounded and appends a diagnostic to note.
std::pair<double, double> selective_ci(double t_obs, double v,
                                       const IntervalSet& z, double alpha,
                                       std::string* note = nullptr);

//! Lower one-sided interval (lo, +inf) at level 1 - alpha.
double selective_ci_lower(double t_obs, double v, const IntervalSet& z,
                          double alpha, std::string* note = nullptr);

//! Inference record produced by each method.
struct SelectiveResult {
  std::string method;
  double p_one_sided = std::numeric_limits<double>::quiet_NaN();
  double p_two_sided = std::numeric_limits<double>::quiet_NaN();
  double ci_lo = -std::numeric_limits<double>::infinity();
  double ci_hi = std::numeric_limits<double>::infinity();
  double ci_lower_bound = -std::numeric_limits<double>::infinity();
  double v = 0.0;
  double t_obs = 0.0;
  IntervalSet z;
  std::string note;
};

//! Z-test without any selection correction.
SelectiveResult naive_inference(double t_obs, double v, double alpha);

double naive_log_p(double t_obs, double v);

//! min(1, p * M^n_steps * base^M), evaluated in log space.
double bonferroni_p(double p_naive, int m_candidates, int n_steps,
                    double window_count_base);

double bonferroni_log_p(double log_p_naive, int m_candidates, int n_steps,
                        double window_count_base);

//! Naive interval widened to the Bonferroni-corrected level.
SelectiveResult bonferroni_inference(double t_obs, double v, double alpha,
                                     int m_candidates, int n_steps,
                                     double window_count_base);

//! Randomized selective CDF: the hard truncation is replaced by the
//! smooth weight w(u) = P(u + R in Z_tilde) with R ~ N(0, tau2 |eta|^2);
//! outer integrals over u run adaptive quadrature on
//! [delta - 10 s, delta + 10 s], s^2 = v + tau_eta^2.
double randomized_selective_cdf(double delta, double v, double tau2,
                                double eta_norm2, const IntervalSet& z_tilde,
                                double t);

//! p-values and intervals from the randomized CDF, evaluated at the
//! unrandomized statistic.
SelectiveResult randomized_inference(double t_obs, double v, double tau2,
                                     double eta_norm2,
                                     const IntervalSet& z_tilde, double alpha);

}  // namespace postadc
