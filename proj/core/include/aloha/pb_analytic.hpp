#pragma once

#include "aloha/cb_analytic.hpp"
#include "aloha/model.hpp"

namespace aloha {

/// Packet-based Aloha is the connection-based model with one-slot payloads
/// and no connection overhead; evaluation goes through the same code path.
struct PbEvaluation {
  Regime regime = Regime::saturated;
  SteadyRegion region;   ///< Lambert argument is -n*lambda
  double p_success = 0.0;
  double throughput = 0.0;           ///< packets per slot
  double lifetime = 0.0;             ///< slots
  double lifetime_throughput = 0.0;  ///< packets per lifetime
};

PbEvaluation pb_eval(const PbParams& p, const EnergyProfile& e);

}  // namespace aloha
