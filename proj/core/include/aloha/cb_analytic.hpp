#pragma once

#include "aloha/model.hpp"

namespace aloha {

enum class Regime { unsaturated, saturated };

std::string_view to_string(Regime r);

/// Range of transmission probabilities for which the request queues settle
/// at the large success-probability fixed point.
///
/// With a = -n*lambda / (M - n*lambda*(M + delta - 1)) the endpoints are
/// q_lo = -W0(a)/n and q_hi = -W-1(a)/n, and the success probability inside
/// is p_large = exp(W0(a)). `defined` is false when the offered load cannot be
/// stabilized for any q (a < -1/e or a non-positive denominator).
struct SteadyRegion {
  bool defined = false;
  double lambert_arg = 0.0;
  double q_lo = 0.0;
  double q_hi = 0.0;     ///< clamped to 1
  double p_large = 0.0;  ///< p_L
  double p_small = 0.0;  ///< p_S
};

SteadyRegion steady_interval(const CbParams& p);

/// Unsaturated exactly when q lies in the closed interval [q_lo, q_hi].
Regime regime(const CbParams& p, const SteadyRegion& region);
Regime regime(const CbParams& p);

double success_prob(const CbParams& p);
double node_throughput(const CbParams& p);
double lifetime(const CbParams& p, const EnergyProfile& e);
double lifetime_throughput(const CbParams& p, const EnergyProfile& e);

struct Evaluation {
  Regime regime = Regime::saturated;
  SteadyRegion region;
  double p_success = 0.0;
  double throughput = 0.0;           ///< lambda_out, units per slot
  double lifetime = 0.0;             ///< slots
  double lifetime_throughput = 0.0;  ///< units per lifetime
};

/// All of the above in one pass, sharing the Lambert evaluations.
Evaluation evaluate(const CbParams& p, const EnergyProfile& e);

// Branch formulas. The saturated ones take the network attempt rate
// G = n*q = -ln(p) rather than p itself; G = 0 is the no-transmission limit.

/// -ln(p) with p clamped to [1e-300, 1 - 1e-15].
double attempt_rate_of(double p);

double saturated_throughput(const CbParams& p, double attempt_rate);
double saturated_lifetime(const CbParams& p, const EnergyProfile& e, double attempt_rate);
double saturated_lifetime_throughput(const CbParams& p, const EnergyProfile& e,
                                     double attempt_rate);
double unsaturated_lifetime(const CbParams& p, const EnergyProfile& e, double p_large);
double unsaturated_lifetime_throughput(const CbParams& p, const EnergyProfile& e,
                                       double p_large);

/// Expected per-lifetime tallies of one node.
///
/// n_idle + n_wait + n_failed + n_success*(M+delta) is the lifetime, and the
/// power-weighted sum is the budget. `mu_r` is successes per busy slot and
/// `rho` the offered load of the request queue.
struct StateCounts {
  double n_idle = 0.0;
  double n_wait = 0.0;
  double n_failed = 0.0;
  double n_success = 0.0;
  double mu_r = 0.0;
  double rho = 0.0;

  double slots(double m, double delta) const {
    return n_idle + n_wait + n_failed + n_success * (m + delta);
  }
};

/// Solves the four balance equations of the state tallies as a linear system
/// in (n_I, n_W, n_F, n_S, T).
///
/// Saturated: n_I = 0 and the request service rate is the saturated
/// per-node success rate. Unsaturated: successes match arrivals
/// (n_S = lambda*T/M), and waiting slots follow a mean-field closure in which
/// a node holds a request in a fraction q_lo/q of contention slots and of
/// the slots other nodes' connections occupy.
StateCounts expected_state_counts(const CbParams& p, const EnergyProfile& e);

}  // namespace aloha
