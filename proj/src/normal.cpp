#include "postadc/normal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "postadc/errors.hpp"

namespace postadc {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
const double kInvSqrt2 = 1.0 / std::numbers::sqrt2;
const double kLogSqrt2Pi = 0.5 * std::log(2.0 * std::numbers::pi);
const double kSqrtPi = std::sqrt(std::numbers::pi);

// Laplace continued fraction for erfcx at large x; converges fast for
// x >= 6.5 where the direct product exp(x^2) erfc(x) starts losing bits.
double erfcx_large(double x) {
  double cf = 0.0;
  for (int k = 24; k >= 1; --k) cf = 0.5 * k / (x + cf);
  return 1.0 / (kSqrtPi * (x + cf));
}

}  // namespace

double erfcx(double x) {
  if (std::isnan(x)) return x;
  if (x >= 6.5) return erfcx_large(x);
  if (x >= 0.0) return std::exp(x * x) * std::erfc(x);
  // erfcx(-x) = 2 exp(x^2) - erfcx(x); overflows for x << -26, which the
  // callers below never request.
  const double e = std::exp(x * x);
  if (!std::isfinite(e)) return kInf;
  return 2.0 * e - erfcx(-x);
}

double norm_pdf(double x) {
  return std::exp(-0.5 * x * x - kLogSqrt2Pi);
}

double norm_cdf(double x) {
  if (x != x) return x;
  return 0.5 * std::erfc(-x * kInvSqrt2);
}

double norm_sf(double x) { return 0.5 * std::erfc(x * kInvSqrt2); }

double norm_log_sf(double x) {
  if (std::isnan(x)) return x;
  if (x == kInf) return -kInf;
  if (x == -kInf) return 0.0;
  if (x <= 0.0) {
    // sf(x) = 1 - sf(-x) with sf(-x) <= 1/2.
    return std::log1p(-norm_sf(-x));
  }
  return std::log(0.5 * erfcx(x * kInvSqrt2)) - 0.5 * x * x;
}

double norm_log_mass(double a, double b) {
  if (std::isnan(a) || std::isnan(b)) return std::numeric_limits<double>::quiet_NaN();
  if (!(a < b)) return -kInf;
  if (b <= 0.0) return norm_log_mass(-b, -a);
  if (a >= 0.0) {
    // sf(a) - sf(b) = sf(a) (1 - sf(b)/sf(a)), entirely in log space.
    const double la = norm_log_sf(a);
    const double lb = norm_log_sf(b);
    if (la == -kInf) return -kInf;
    const double ratio = std::exp(lb - la);
    return la + std::log1p(-ratio);
  }
  // a < 0 < b: both erf terms are nonnegative, no cancellation.
  const double mass = 0.5 * std::erf(b * kInvSqrt2) + 0.5 * std::erf(-a * kInvSqrt2);
  return std::log(mass);
}

double norm_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    if (p == 0.0) return -kInf;
    if (p == 1.0) return kInf;
    throw ConfigError("norm_quantile: p must lie in [0,1]");
  }
  // Acklam's rational approximation followed by one Halley step.
  static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                             -2.759285104469687e+02, 1.383577518672690e+02,
                             -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                             -1.556989798598866e+02, 6.680131188771972e+01,
                             -1.328068155288572e+01};
  static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                             -2.400758277161838e+00, -2.549732539343734e+00,
                             4.374664141464968e+00,  2.938163982698783e+00};
  static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                             2.445134137142996e+00, 3.754408661907416e+00};
  const double plow = 0.02425;
  double x;
  if (p < plow) {
    const double q = std::sqrt(-2.0 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else if (p <= 1.0 - plow) {
    const double q = p - 0.5;
    const double r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) *
        q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  } else {
    const double q = std::sqrt(-2.0 * std::log1p(-p));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  if (0.5 * x * x < 700.0) {  // one Halley step where exp stays finite
    const double e = norm_cdf(x) - p;
    const double u =
        e * std::sqrt(2.0 * std::numbers::pi) * std::exp(0.5 * x * x);
    x -= u / (1.0 + 0.5 * x * u);
  }
  return x;
}

double norm_upper_quantile_from_log(double log_tail) {
  if (!(log_tail <= std::log(0.5))) {
    throw ConfigError("norm_upper_quantile_from_log: tail above 1/2");
  }
  if (log_tail == -kInf) return kInf;
  if (log_tail >= std::log(1e-290)) {
    // upper quantile by symmetry, keeping the tail in full precision
    return -norm_quantile(std::exp(log_tail));
  }
  // Bisection on the monotone norm_log_sf; the bracket covers every
  // double log_tail of practical size.
  double lo = 0.0, hi = 64.0;
  while (norm_log_sf(hi) > log_tail) hi *= 2.0;
  for (int it = 0; it < 200 && hi - lo > 1e-12 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (norm_log_sf(mid) > log_tail ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

double log_sum_exp(const std::vector<double>& v) {
  double m = -kInf;
  for (double x : v) m = std::max(m, x);
  if (m == -kInf) return -kInf;
  double s = 0.0;
  for (double x : v) s += std::exp(x - m);
  return m + std::log(s);
}

}  // namespace postadc
