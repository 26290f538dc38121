#include "aloha/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "aloha/special_fn.hpp"

namespace aloha {
namespace {

// -ln(p_m), written so that r = 1 needs no limit.
double optimal_attempt_rate(int n, double r) {
  const double dn = n;
  return 2.0 * dn / (dn + std::sqrt(dn * dn + 4.0 * dn * (r - 1.0)));
}

void check_ratio(double r) {
  if (!(r >= 1.0)) throw std::invalid_argument("power ratio P_T/P_W must be >= 1");
}

void check_t0_range(double t0, double t0s, double cap) {
  if (!(t0 > t0s && t0 <= cap)) {
    throw std::invalid_argument("lifetime target " + std::to_string(t0) +
                                " outside (T0*, E/(sigma P_W)] = (" + std::to_string(t0s) +
                                ", " + std::to_string(cap) + "]");
  }
}

// Largest-p side of the saturated branch that still meets t0. The saturated
// lifetime decreases in G, so plain bisection keeps `lo` feasible.
double critical_attempt_rate(const CbParams& p, const EnergyProfile& e, double t0,
                             double g_hi) {
  double lo = 0.0;
  double hi = g_hi;
  for (int i = 0; i < 400; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (saturated_lifetime(p, e, mid) >= t0) {
      lo = mid;
    } else {
      hi = mid;
    }
    if (hi - lo <= 1e-17 * hi) break;
  }
  return lo;
}

OptResult infeasible(const Thresholds& th) {
  OptResult r;
  r.thresholds = th;
  return r;
}

}  // namespace

std::string_view to_string(OptCase c) {
  switch (c) {
    case OptCase::below_t0star_unsat: return "below_T0star_unsat";
    case OptCase::below_t0star_sat: return "below_T0star_sat";
    case OptCase::constrained_by_t0: return "constrained_by_T0";
    case OptCase::infeasible: return "infeasible";
  }
  return "?";
}

double optimal_success_prob(int n, double power_ratio) {
  check_ratio(power_ratio);
  return std::exp(-optimal_attempt_rate(n, power_ratio));
}

double saturation_boundary(Scheme scheme, int n, double m, double delta, double power_ratio) {
  check_ratio(power_ratio);
  const double pm = optimal_success_prob(n, power_ratio);
  if (scheme == Scheme::pb) {
    // (sqrt(1 + 4(r-1)/n) - 1) / (2(r-1)) * p_m, rationalized.
    const double r1 = power_ratio - 1.0;
    return 2.0 / (n * (std::sqrt(1.0 + 4.0 * r1 / n) + 1.0)) * pm;
  }
  const double x = pm * std::log(pm);
  return (m / n) * x / (x * (m + delta - 1.0) - 1.0);
}

double t0_star(const CbParams& p, const EnergyProfile& e) {
  const double gm = optimal_attempt_rate(p.n, e.power_ratio());
  const double at_pm = saturated_lifetime(p, e, gm);
  const SteadyRegion region = steady_interval(p);
  if (!region.defined) return at_pm;
  return std::max(unsaturated_lifetime(p, e, region.p_large), at_pm);
}

double t0_star(const PbParams& p, const EnergyProfile& e) {
  const double lm = saturation_boundary(Scheme::pb, p.n, 1.0, 0.0, e.power_ratio());
  const double l = std::min(p.lambda, lm);
  if (l == 0.0) return e.max_lifetime();
  const double pl = std::exp(lambert_w0(-p.n * l));
  return e.budget / (l / pl * (e.p_tx - e.p_wait) + e.p_wait);
}

double critical_p(const CbParams& p, const EnergyProfile& e, double t0) {
  check_t0_range(t0, t0_star(p, e), e.max_lifetime());
  const double pm = optimal_success_prob(p.n, e.power_ratio());
  const SteadyRegion region = steady_interval(p);
  const double p_floor = region.defined ? std::max(region.p_large, pm) : pm;
  return std::exp(-critical_attempt_rate(p, e, t0, attempt_rate_of(p_floor)));
}

double critical_p(const PbParams& p, const EnergyProfile& e, double t0) {
  check_t0_range(t0, t0_star(p, e), e.max_lifetime());
  return std::exp(-p.n * (e.budget / t0 - e.p_wait) / (e.p_tx - e.p_wait));
}

OptResult optimize(const CbParams& p, const EnergyProfile& e, double t0) {
  const double r = e.power_ratio();
  Thresholds th;
  th.p_m = optimal_success_prob(p.n, r);
  th.lambda_m = saturation_boundary(Scheme::cb, p.n, p.m, p.delta, r);
  th.t0_star = t0_star(p, e);
  if (t0 > e.max_lifetime()) return infeasible(th);

  const SteadyRegion region = steady_interval(p);
  OptResult out;
  out.feasible = true;

  if (t0 <= th.t0_star) {
    if (region.defined && p.lambda <= th.lambda_m) {
      out.case_tag = OptCase::below_t0star_unsat;
      out.regime = Regime::unsaturated;
      out.u_max = unsaturated_lifetime_throughput(p, e, region.p_large);
      out.q_lo = region.q_lo;
      out.q_hi = region.q_hi;
      out.p_opt = region.p_large;
    } else {
      const double gm = optimal_attempt_rate(p.n, r);
      out.case_tag = OptCase::below_t0star_sat;
      out.regime = Regime::saturated;
      out.u_max = saturated_lifetime_throughput(p, e, gm);
      out.q_lo = out.q_hi = gm / p.n;
      out.p_opt = th.p_m;
    }
  } else {
    const double p_floor = region.defined ? std::max(region.p_large, th.p_m) : th.p_m;
    const double gc = critical_attempt_rate(p, e, t0, attempt_rate_of(p_floor));
    th.p_c = std::exp(-gc);
    out.case_tag = OptCase::constrained_by_t0;
    out.regime = Regime::saturated;
    out.u_max = saturated_lifetime_throughput(p, e, gc);
    out.q_lo = out.q_hi = gc / p.n;
    out.p_opt = *th.p_c;
  }
  out.thresholds = th;
  return out;
}

OptResult optimize(const PbParams& p, const EnergyProfile& e, double t0) {
  const double r = e.power_ratio();
  const double dpt = e.p_tx - e.p_wait;
  Thresholds th;
  th.p_m = optimal_success_prob(p.n, r);
  th.lambda_m = saturation_boundary(Scheme::pb, p.n, 1.0, 0.0, r);
  th.t0_star = t0_star(p, e);
  if (t0 > e.max_lifetime()) return infeasible(th);

  OptResult out;
  out.feasible = true;
  if (t0 <= th.t0_star) {
    if (p.lambda <= th.lambda_m) {
      out.case_tag = OptCase::below_t0star_unsat;
      out.regime = Regime::unsaturated;
      if (p.lambda == 0.0) {
        out.u_max = 0.0;
        out.q_lo = 0.0;
        out.q_hi = 1.0;
        out.p_opt = 1.0;
      } else {
        const double arg = -p.n * p.lambda;
        const double w0 = lambert_w0(arg);
        out.p_opt = std::exp(w0);
        out.u_max = e.budget / (dpt / out.p_opt + e.p_wait / p.lambda);
        out.q_lo = std::clamp(-w0 / p.n, 0.0, 1.0);
        out.q_hi = std::clamp(-lambert_wm1(arg) / p.n, 0.0, 1.0);
      }
    } else {
      out.case_tag = OptCase::below_t0star_sat;
      out.regime = Regime::saturated;
      const double pl = std::exp(lambert_w0(-p.n * th.lambda_m));
      out.u_max = e.budget / (dpt / pl + e.p_wait / th.lambda_m);
      out.q_lo = out.q_hi = -std::log(th.p_m) / p.n;
      out.p_opt = th.p_m;
    }
  } else {
    const double gc = p.n * (e.budget / t0 - e.p_wait) / dpt;
    th.p_c = std::exp(-gc);
    out.case_tag = OptCase::constrained_by_t0;
    out.regime = Regime::saturated;
    // (P_T - P_W)/p_c - n P_W/(p_c ln p_c) with ln p_c = -gc.
    out.u_max = gc > 0.0 ? e.budget / (dpt * std::exp(gc) + p.n * e.p_wait * std::exp(gc) / gc)
                         : 0.0;
    out.q_lo = out.q_hi = gc / p.n;
    out.p_opt = *th.p_c;
  }
  out.thresholds = th;
  return out;
}

}  // namespace aloha
