#include "postadc/truncated_normal.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "postadc/errors.hpp"
#include "postadc/normal.hpp"

namespace postadc {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double clamp01(double p) { return std::min(1.0, std::max(0.0, p)); }

void require_tn_inputs(double v, const IntervalSet& z) {
  if (!(v > 0.0)) throw ConfigError("truncated normal: v must be > 0");
  if (z.empty()) throw ConfigError("truncated normal: empty truncation set");
}

void require_member(double t_obs, double v, const IntervalSet& z) {
  if (!z.contains(t_obs, 1e-8 * std::sqrt(v) + 1e-12)) {
    throw ConfigError("selective inference: t_obs outside truncation set");
  }
}

// Monotone-decreasing G(delta); returns delta with G(delta) = target.
// Bracket expands geometrically from center +- scale, factor 2, at most
// max_expansions times; failure leaves the endpoint unbounded.
double invert_decreasing(const std::function<double(double)>& cdf,
                         double target, double center, double scale,
                         const char* label, std::string* note) {
  constexpr int kMaxExpansions = 200;
  const double sign_for_fail =
      target > 0.5 ? -1.0 : 1.0;  // high target -> left root

  double lo = center - scale;
  double hi = center + scale;
  auto fail = [&](const char* what) {
    if (note) {
      if (!note->empty()) *note += "; ";
      *note += std::string(label) + " unbounded (" + what + ")";
    }
    return sign_for_fail * kInf;
  };

  double step = scale;
  int e = 0;
  double g_lo = cdf(lo);
  while (std::isfinite(g_lo) && g_lo < target) {
    if (++e > kMaxExpansions) return fail("bracket expansion limit");
    step *= 2.0;
    lo -= step;
    g_lo = cdf(lo);
  }
  if (!std::isfinite(g_lo)) return fail("cdf not finite during bracketing");

  step = scale;
  e = 0;
  double g_hi = cdf(hi);
  while (std::isfinite(g_hi) && g_hi > target) {
    if (++e > kMaxExpansions) return fail("bracket expansion limit");
    step *= 2.0;
    hi += step;
    g_hi = cdf(hi);
  }
  if (!std::isfinite(g_hi)) return fail("cdf not finite during bracketing");

  const double tol = 1e-8 * scale;
  for (int it = 0; it < 300 && hi - lo > tol; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double g = cdf(mid);
    if (!std::isfinite(g)) {
      throw NumericalError("selective_ci: cdf not finite during bisection");
    }
    (g >= target ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

double tn_cdf(double delta, double v, const IntervalSet& z, double t) {
  require_tn_inputs(v, z);
  const double s = std::sqrt(v);

  std::vector<double> log_den;
  std::vector<double> log_num;
  for (const Interval& iv : z.intervals()) {
    const double alpha = (iv.lo - delta) / s;
    const double beta = (iv.hi - delta) / s;
    const double lm = norm_log_mass(alpha, beta);
    log_den.push_back(lm);
    if (t >= iv.hi) {
      log_num.push_back(lm);
    } else if (t > iv.lo) {
      log_num.push_back(norm_log_mass(alpha, (t - delta) / s));
    }
  }

  const double lden = log_sum_exp(log_den);
  if (!std::isfinite(lden)) {
    throw NumericalError("tn_cdf: truncated mass underflows log range");
  }
  if (log_num.empty()) return 0.0;
  return clamp01(std::exp(log_sum_exp(log_num) - lden));
}

double selective_p(double t_obs, double v, const IntervalSet& z) {
  require_member(t_obs, v, z);
  return clamp01(1.0 - tn_cdf(0.0, v, z, t_obs));
}

double selective_p_two_sided(double t_obs, double v, const IntervalSet& z) {
  require_member(t_obs, v, z);
  const double g = tn_cdf(0.0, v, z, t_obs);
  return clamp01(2.0 * std::min(g, 1.0 - g));
}

std::pair<double, double> selective_ci(double t_obs, double v,
                                       const IntervalSet& z, double alpha,
                                       std::string* note) {
  require_member(t_obs, v, z);
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw ConfigError("selective_ci: alpha must lie in (0,1)");
  }
  const double s = std::sqrt(v);
  auto g = [&](double delta) { return tn_cdf(delta, v, z, t_obs); };
  const double lo =
      invert_decreasing(g, 1.0 - alpha / 2.0, t_obs, s, "ci_lo", note);
  const double hi = invert_decreasing(g, alpha / 2.0, t_obs, s, "ci_hi", note);
  return {lo, hi};
}

double selective_ci_lower(double t_obs, double v, const IntervalSet& z,
                          double alpha, std::string* note) {
  require_member(t_obs, v, z);
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw ConfigError("selective_ci_lower: alpha must lie in (0,1)");
  }
  auto g = [&](double delta) { return tn_cdf(delta, v, z, t_obs); };
  return invert_decreasing(g, 1.0 - alpha, t_obs, std::sqrt(v), "ci_lower",
                           note);
}

SelectiveResult naive_inference(double t_obs, double v, double alpha) {
  if (!(v > 0.0)) throw ConfigError("naive_inference: v must be > 0");
  const double s = std::sqrt(v);
  SelectiveResult r;
  r.method = "naive";
  r.t_obs = t_obs;
  r.v = v;
  r.z = IntervalSet::all_reals();
  r.p_one_sided = norm_sf(t_obs / s);
  r.p_two_sided = clamp01(2.0 * norm_sf(std::fabs(t_obs) / s));
  const double q = norm_quantile(1.0 - alpha / 2.0);
  r.ci_lo = t_obs - q * s;
  r.ci_hi = t_obs + q * s;
  r.ci_lower_bound = t_obs - norm_quantile(1.0 - alpha) * s;
  return r;
}

double naive_log_p(double t_obs, double v) {
  return norm_log_sf(t_obs / std::sqrt(v));
}

double bonferroni_log_p(double log_p_naive, int m_candidates, int n_steps,
                        double window_count_base) {
  if (m_candidates < 1 || n_steps < 0 || !(window_count_base > 0.0)) {
    throw ConfigError("bonferroni: invalid correction inputs");
  }
  const double log_correction = n_steps * std::log(double(m_candidates)) +
                                m_candidates * std::log(window_count_base);
  return std::min(0.0, log_p_naive + log_correction);
}

double bonferroni_p(double p_naive, int m_candidates, int n_steps,
                    double window_count_base) {
  if (p_naive <= 0.0) return 0.0;
  return std::exp(bonferroni_log_p(std::log(p_naive), m_candidates, n_steps,
                                   window_count_base));
}

SelectiveResult bonferroni_inference(double t_obs, double v, double alpha,
                                     int m_candidates, int n_steps,
                                     double window_count_base) {
  const double s = std::sqrt(v);
  SelectiveResult r;
  r.method = "bonferroni";
  r.t_obs = t_obs;
  r.v = v;
  r.z = IntervalSet::all_reals();
  r.p_one_sided =
      std::exp(bonferroni_log_p(naive_log_p(t_obs, v), m_candidates, n_steps,
                                window_count_base));
  r.p_two_sided = std::exp(bonferroni_log_p(
      naive_log_p(std::fabs(t_obs), v) + std::log(2.0), m_candidates, n_steps,
      window_count_base));
  const double log_correction = n_steps * std::log(double(m_candidates)) +
                                m_candidates * std::log(window_count_base);
  const double q = norm_upper_quantile_from_log(std::log(alpha / 2.0) -
                                                log_correction);
  r.ci_lo = t_obs - q * s;
  r.ci_hi = t_obs + q * s;
  r.ci_lower_bound =
      t_obs - norm_upper_quantile_from_log(std::log(alpha) - log_correction) * s;
  return r;
}

namespace {

// Adaptive Simpson on [lo, hi]; f is the scaled integrand (max ~ 1).
struct SimpsonState {
  const std::function<double(double)>& f;
  double eps;
  bool converged = true;
};

double simpson_recurse(SimpsonState& st, double lo, double mid, double hi,
                       double f_lo, double f_mid, double f_hi, double whole,
                       int depth) {
  const double lmid = 0.5 * (lo + mid);
  const double rmid = 0.5 * (mid + hi);
  const double f_lmid = st.f(lmid);
  const double f_rmid = st.f(rmid);
  const double left = (mid - lo) / 6.0 * (f_lo + 4.0 * f_lmid + f_mid);
  const double right = (hi - mid) / 6.0 * (f_mid + 4.0 * f_rmid + f_hi);
  const double err = left + right - whole;
  if (std::fabs(err) <= 15.0 * st.eps) return left + right + err / 15.0;
  if (depth >= 60 || (hi - lo) < 1e-14 * (1.0 + std::fabs(lo))) {
    st.converged = false;
    return left + right + err / 15.0;
  }
  const double half_eps = st.eps / 2.0;
  SimpsonState sub{st.f, half_eps, true};
  const double a =
      simpson_recurse(sub, lo, lmid, mid, f_lo, f_lmid, f_mid, left, depth + 1);
  const double b = simpson_recurse(sub, mid, rmid, hi, f_mid, f_rmid, f_hi,
                                   right, depth + 1);
  st.converged = st.converged && sub.converged;
  return a + b;
}

double adaptive_simpson(const std::function<double(double)>& f, double lo,
                        double hi, double eps, bool* converged) {
  const double mid = 0.5 * (lo + hi);
  const double f_lo = f(lo), f_mid = f(mid), f_hi = f(hi);
  const double whole = (hi - lo) / 6.0 * (f_lo + 4.0 * f_mid + f_hi);
  SimpsonState st{f, eps, true};
  const double out =
      simpson_recurse(st, lo, mid, hi, f_lo, f_mid, f_hi, whole, 0);
  if (converged) *converged = *converged && st.converged;
  return out;
}

}  // namespace

double randomized_selective_cdf(double delta, double v, double tau2,
                                double eta_norm2, const IntervalSet& z_tilde,
                                double t) {
  require_tn_inputs(v, z_tilde);
  if (!(tau2 >= 0.0) || !(eta_norm2 > 0.0)) {
    throw ConfigError("randomized_selective_cdf: bad randomization inputs");
  }
  const double tau_eta2 = tau2 * eta_norm2;
  if (tau_eta2 == 0.0) return tn_cdf(delta, v, z_tilde, t);
  const double tau_eta = std::sqrt(tau_eta2);
  const double s = std::sqrt(v);
  const double span = 10.0 * std::sqrt(v + tau_eta2);
  const double lo = delta - span;
  const double hi = delta + span;

  auto weight = [&](double u) {
    double w = 0.0;
    for (const Interval& iv : z_tilde.intervals()) {
      w += norm_cdf((iv.hi - u) / tau_eta) - norm_cdf((iv.lo - u) / tau_eta);
    }
    return w;
  };

  // Quadrature breakpoints: the domain, t, and the weight's transition
  // zones around each finite interval endpoint.
  std::vector<double> cuts{lo, hi};
  auto add_cut = [&](double u) {
    if (u > lo && u < hi) cuts.push_back(u);
  };
  add_cut(t);
  add_cut(delta);
  for (const Interval& iv : z_tilde.intervals()) {
    for (double e : {iv.lo, iv.hi}) {
      if (!std::isfinite(e)) continue;
      add_cut(e);
      add_cut(e - 6.0 * tau_eta);
      add_cut(e + 6.0 * tau_eta);
    }
  }
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  bool converged = true;
  std::vector<double> log_den;
  std::vector<double> log_num;
  for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
    const double a = cuts[k];
    const double b = cuts[k + 1];
    // Factor out the peak of the normal density on this piece so the
    // scaled integrand stays O(1) even when delta sits far away.
    const double peak = std::clamp(delta, a, b);
    const double log_scale =
        -0.5 * (peak - delta) * (peak - delta) / v - std::log(s) -
        0.5 * std::log(2.0 * std::acos(-1.0));
    auto f = [&](double u) {
      const double le = -0.5 * (u - delta) * (u - delta) / v - std::log(s) -
                        0.5 * std::log(2.0 * std::acos(-1.0));
      return std::exp(le - log_scale) * weight(u);
    };
    double piece = adaptive_simpson(f, a, b, 1e-10, &converged);
    if (piece < 0.0) piece = 0.0;
    const double log_piece =
        piece > 0.0 ? log_scale + std::log(piece) : -kInf;
    log_den.push_back(log_piece);
    if (b <= t) log_num.push_back(log_piece);
  }
  if (!converged) {
    throw NumericalError("randomized_selective_cdf: quadrature did not converge");
  }

  const double lden = log_sum_exp(log_den);
  if (!std::isfinite(lden)) {
    throw NumericalError("randomized_selective_cdf: weighted mass underflow");
  }
  if (t <= lo) return 0.0;
  if (t >= hi) return 1.0;
  if (log_num.empty()) return 0.0;
  return clamp01(std::exp(log_sum_exp(log_num) - lden));
}

SelectiveResult randomized_inference(double t_obs, double v, double tau2,
                                     double eta_norm2,
                                     const IntervalSet& z_tilde, double alpha) {
  SelectiveResult r;
  r.method = "randomized";
  r.t_obs = t_obs;
  r.v = v;
  r.z = z_tilde;
  auto g = [&](double delta) {
    return randomized_selective_cdf(delta, v, tau2, eta_norm2, z_tilde, t_obs);
  };
  const double g0 = g(0.0);
  r.p_one_sided = clamp01(1.0 - g0);
  r.p_two_sided = clamp01(2.0 * std::min(g0, 1.0 - g0));
  const double s = std::sqrt(v);
  r.ci_lo = invert_decreasing(g, 1.0 - alpha / 2.0, t_obs, s, "ci_lo", &r.note);
  r.ci_hi = invert_decreasing(g, alpha / 2.0, t_obs, s, "ci_hi", &r.note);
  r.ci_lower_bound =
      invert_decreasing(g, 1.0 - alpha, t_obs, s, "ci_lower", &r.note);
  return r;
}

}  // namespace postadc
