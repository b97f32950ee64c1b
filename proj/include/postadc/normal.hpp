#pragma once

#include <vector>

namespace postadc {

//! Scaled complementary error function exp(x^2) erfc(x), accurate for
//! large positive x where erfc itself underflows.
double erfcx(double x);

double norm_pdf(double x);
double norm_cdf(double x);

//! Upper tail P(N(0,1) > x).
double norm_sf(double x);

//! log of the upper tail, stable out to |x| of several hundred.
double norm_log_sf(double x);

//! log P(a < N(0,1) <= b) for a <= b, without cancellation in far tails.
double norm_log_mass(double a, double b);

//! Quantile function of the standard normal.
double norm_quantile(double p);

//! z with P(N(0,1) > z) = exp(log_tail), for log_tail <= log(1/2).
//! Handles tails far below the smallest representable double p.
double norm_upper_quantile_from_log(double log_tail);

//! log(sum(exp(v))) over possibly -inf entries.
double log_sum_exp(const std::vector<double>& v);

}  // namespace postadc
