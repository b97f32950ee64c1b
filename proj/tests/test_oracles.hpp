// Independent oracles used by the test suites. Everything here follows a
// different computational route than the library code it checks: direct
// dense inverses, long-double quadrature of the raw density, exhaustive
// scans.
#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <functional>
#include <vector>

#include "postadc/adc.hpp"
#include "postadc/interval_set.hpp"

namespace oracle {

// GP posterior via explicit matrix inverse, no shared code with the
// library's factorized solve.
inline std::pair<double, double> gp_posterior_dense(
    const Eigen::MatrixXd& history_points, const Eigen::VectorXd& y,
    const Eigen::VectorXd& x, const postadc::GpUcbConfig& config) {
  const int n = static_cast<int>(history_points.rows());
  Eigen::MatrixXd gram(n, n);
  Eigen::VectorXd cross(n);
  auto kern = [&](const Eigen::VectorXd& u, const Eigen::VectorXd& v) {
    return config.kernel_variance *
           std::exp(-(u - v).squaredNorm() /
                    (2.0 * config.length_scale * config.length_scale));
  };
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      gram(i, j) = kern(history_points.row(i), history_points.row(j));
    }
    gram(i, i) += config.noise_variance;
    cross[i] = kern(x, history_points.row(i));
  }
  const Eigen::MatrixXd inv = gram.inverse();
  const double mean = cross.dot(inv * y);
  const double var = kern(x, x) - cross.dot(inv * cross);
  return {mean, var};
}

// Adaptive Simpson in long double.
inline long double simpson_ld(const std::function<long double(long double)>& f,
                              long double lo, long double hi, long double eps,
                              int depth = 0) {
  const long double mid = (lo + hi) / 2.0L;
  const long double f_lo = f(lo), f_mid = f(mid), f_hi = f(hi);
  const long double whole = (hi - lo) / 6.0L * (f_lo + 4.0L * f_mid + f_hi);
  std::function<long double(long double, long double, long double,
                            long double, long double, long double,
                            long double, long double, int)>
      rec = [&](long double a, long double m, long double b, long double fa,
                long double fm, long double fb, long double s,
                long double tol, int d) -> long double {
    const long double lm = (a + m) / 2.0L, rm = (m + b) / 2.0L;
    const long double flm = f(lm), frm = f(rm);
    const long double left = (m - a) / 6.0L * (fa + 4.0L * flm + fm);
    const long double right = (b - m) / 6.0L * (fm + 4.0L * frm + fb);
    const long double err = left + right - s;
    if (std::fabs((double)err) <= 15.0L * tol || d > 52) {
      return left + right + err / 15.0L;
    }
    return rec(a, lm, m, fa, flm, fm, left, tol / 2.0L, d + 1) +
           rec(m, rm, b, fm, frm, fb, right, tol / 2.0L, d + 1);
  };
  return rec(lo, mid, hi, f_lo, f_mid, f_hi, whole, eps, depth);
}

// Truncated-normal CDF by direct quadrature of the density, with the
// density rescaled by its maximum over Z so far tails stay representable.
inline double tn_cdf_quadrature(double delta, double v,
                                const postadc::IntervalSet& z, double t) {
  const long double s = std::sqrt((long double)v);
  // closest point of Z to delta sets the scaling.
  long double peak_u = 0.0L;
  bool have_peak = false;
  for (const postadc::Interval& iv : z.intervals()) {
    long double u;
    if (delta < iv.lo) {
      u = iv.lo;
    } else if (delta > iv.hi) {
      u = iv.hi;
    } else {
      u = delta;
    }
    if (!have_peak || std::fabs((double)(u - delta)) <
                          std::fabs((double)(peak_u - delta))) {
      peak_u = u;
      have_peak = true;
    }
  }
  const long double log_scale =
      -(peak_u - delta) * (peak_u - delta) / (2.0L * s * s);
  auto dens = [&](long double u) {
    const long double le = -(u - delta) * (u - delta) / (2.0L * s * s);
    return std::exp((double)(le - log_scale));
  };

  long double num = 0.0L, den = 0.0L;
  for (const postadc::Interval& iv : z.intervals()) {
    // clip unbounded ends at 50 standard deviations from delta.
    const long double lo =
        std::isinf(iv.lo) ? (long double)delta - 50.0L * s
                          : (long double)iv.lo;
    const long double hi =
        std::isinf(iv.hi) ? (long double)delta + 50.0L * s
                          : (long double)iv.hi;
    if (!(lo < hi)) continue;
    den += simpson_ld(dens, lo, hi, 1e-16L);
    const long double tc = std::min((long double)t, hi);
    if (tc > lo) num += simpson_ld(dens, lo, tc, 1e-16L);
  }
  return (double)(num / den);
}

}  // namespace oracle
