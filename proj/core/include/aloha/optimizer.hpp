#pragma once

#include <optional>
#include <string_view>

#include "aloha/cb_analytic.hpp"
#include "aloha/model.hpp"

namespace aloha {

enum class OptCase { below_t0star_unsat, below_t0star_sat, constrained_by_t0, infeasible };

std::string_view to_string(OptCase c);

struct Thresholds {
  double p_m = 0.0;       ///< success probability maximizing saturated lifetime throughput
  double lambda_m = 0.0;  ///< arrival rate separating the two regimes
  double t0_star = 0.0;   ///< largest lifetime target that does not bind
  std::optional<double> p_c;  ///< success probability meeting the target exactly
};

/// Maximal lifetime throughput subject to lifetime >= T0.
///
/// Below T0* in the unsaturated regime every q in [q_lo, q_hi] is optimal;
/// otherwise q_lo == q_hi.
struct OptResult {
  bool feasible = false;
  double u_max = 0.0;
  double q_lo = 0.0;
  double q_hi = 0.0;
  double p_opt = 0.0;
  Regime regime = Regime::saturated;
  OptCase case_tag = OptCase::infeasible;
  Thresholds thresholds;

  bool q_is_interval() const { return q_hi > q_lo; }
  /// Representative q; the interval midpoint when the optimum is an interval.
  double q_point() const { return 0.5 * (q_lo + q_hi); }
};

/// exp((n - sqrt(n^2 + 4n(r-1))) / (2(r-1))), e^-1 at r = 1.
double optimal_success_prob(int n, double power_ratio);

/// Arrival rate above which the network is saturated at the optimum.
double saturation_boundary(Scheme scheme, int n, double m, double delta, double power_ratio);

double t0_star(const CbParams& p, const EnergyProfile& e);
double t0_star(const PbParams& p, const EnergyProfile& e);

/// Requires t0_star < t0 <= E/(sigma P_W); throws std::invalid_argument otherwise.
double critical_p(const CbParams& p, const EnergyProfile& e, double t0);
double critical_p(const PbParams& p, const EnergyProfile& e, double t0);

/// p.q is ignored. t0 = 0 gives the unconstrained optimum.
OptResult optimize(const CbParams& p, const EnergyProfile& e, double t0);
OptResult optimize(const PbParams& p, const EnergyProfile& e, double t0);

}  // namespace aloha
