#include "aloha/pb_analytic.hpp"

namespace aloha {

PbEvaluation pb_eval(const PbParams& p, const EnergyProfile& e) {
  const Evaluation ev = evaluate(as_connection_based(p), e);
  return {ev.regime, ev.region, ev.p_success, ev.throughput, ev.lifetime,
          ev.lifetime_throughput};
}

}  // namespace aloha
