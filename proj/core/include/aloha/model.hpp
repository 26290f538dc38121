#pragma once

#include <string_view>

namespace aloha {

enum class Scheme { cb, pb };

std::string_view to_string(Scheme s);

/// Connection-based Aloha: a short request contends for the channel; a won
/// contention holds the channel for `m + delta` slots of length `sigma`.
/// Rates are per node, in data units (one unit = one slot of payload) per slot.
struct CbParams {
  int n = 1;             ///< node count
  double m = 1.0;        ///< payload duration per connection, in slots
  double delta = 0.0;    ///< signaling overhead per connection, in slots
  double sigma = 1.0;    ///< slot length (time units); analytics are slot-normalized
  double lambda = 0.0;   ///< per-node arrival rate
  double q = 0.0;        ///< transmission probability

  double aggregate_rate() const { return n * lambda; }
  /// Extra slots a success holds the channel beyond its contention slot.
  double hold_extra() const { return m + delta - 1.0; }
};

/// Packet-based Aloha: every attempt carries one packet in one slot.
struct PbParams {
  int n = 1;
  double sigma = 1.0;
  double lambda = 0.0;  ///< packets per slot
  double q = 0.0;

  double aggregate_rate() const { return n * lambda; }
};

/// Battery budget normalized by the scheme's slot length, plus state powers.
/// Idle power equals waiting power.
struct EnergyProfile {
  double budget = 1.0;  ///< E / sigma, in power * slots
  double p_tx = 1.0;
  double p_wait = 1.0;

  double power_ratio() const { return p_tx / p_wait; }
  /// Lifetime of a node that never transmits: the largest attainable.
  double max_lifetime() const { return budget / p_wait; }
  EnergyProfile scaled(double c) const { return {budget * c, p_tx, p_wait}; }
};

/// Physical description of one traffic source served either way.
struct CouplingParams {
  int k = 1;                 ///< packets carried per connection
  double packet_len = 1.0;   ///< packet payload duration L_P
  double pb_overhead = 0.0;  ///< per-packet overhead of the packet-based slot
  double sigma_n = 1.0;      ///< request slot length of the connection-based scheme
  double delta = 0.0;        ///< connection overhead, in request slots
  double lambda_n = 0.0;     ///< arrival rate per request slot
};

/// Both schemes' parameter records derived from one CouplingParams.
/// Transmission probabilities are left at zero.
struct CoupledParams {
  CbParams cb;
  PbParams pb;
  double connection_len = 0.0;  ///< L_N = K * L_P = M * sigma_N
  bool integral_m = true;       ///< the simulator needs an integral M
};

CoupledParams couple(const CouplingParams& c, int n = 1);

/// Budget in the packet-based slot unit for the same battery.
EnergyProfile rescale_budget(const EnergyProfile& e, double from_sigma, double to_sigma);

/// Throw std::invalid_argument naming the first violated invariant.
void validate(const CbParams& p);
void validate(const PbParams& p);
void validate(const EnergyProfile& e);
void validate(const CouplingParams& c);

/// The packet-based network expressed as a connection-based one with
/// M = 1 and no overhead.
CbParams as_connection_based(const PbParams& p);

}  // namespace aloha
