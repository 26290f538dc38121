#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "aloha/cb_analytic.hpp"
#include "aloha/model.hpp"

namespace aloha {

/// Monte-Carlo run configuration. For `Scheme::pb` the `pb` record is used
/// and each request is one packet; for `Scheme::cb` M and delta must be
/// integral.
struct SimConfig {
  Scheme scheme = Scheme::cb;
  CbParams cb;
  PbParams pb;
  EnergyProfile energy;
  std::uint64_t seed = 1;
  int runs = 1;
  std::int64_t slot_cap = 0;  ///< 0 picks ceil(E/(sigma P_W)) + 1
  unsigned threads = 0;       ///< 0 uses hardware concurrency
};

struct StateSlots {
  double idle = 0.0;
  double waiting = 0.0;
  double failed = 0.0;
  double success = 0.0;  ///< slots spent holding the channel
};

/// One run, node averages plus whole-run accounting checks.
struct RunStats {
  double mean_lifetime = 0.0;
  double mean_delivered = 0.0;
  StateSlots slots;
  double successes = 0.0;   ///< completed connections per node
  double collisions = 0.0;  ///< failed attempts per node
  std::int64_t total_successes = 0;
  std::int64_t total_failures = 0;
  std::int64_t aborted = 0;              ///< connections cut short by the owner's death
  /// Attempt outcomes while all n nodes are alive, i.e. the network the
  /// analytic model describes. Successes include aborted connections.
  std::int64_t full_population_successes = 0;
  std::int64_t full_population_failures = 0;
  double max_energy_residual = 0.0;      ///< max over nodes of |tallied energy - budget|
  std::int64_t slot_identity_violations = 0;
  std::int64_t conservation_violations = 0;  ///< delivered != M * successes
  std::int64_t elapsed_slots = 0;
  std::int64_t channel_held_slots = 0;   ///< slots inside some connection
  bool horizon_hit = false;
};

struct SimStats {
  Scheme scheme = Scheme::cb;
  double q = 0.0;
  double mean_lifetime = 0.0;
  double mean_delivered = 0.0;  ///< data units (CB) or packets (PB)
  StateSlots state_slots;
  double successes = 0.0;
  double collisions = 0.0;
  double ci_lifetime = 0.0;   ///< 95% normal half-width over runs
  double ci_delivered = 0.0;
  bool horizon_hit = false;
  std::vector<RunStats> runs;
};

/// Throws std::invalid_argument on an invalid configuration.
SimStats simulate(const SimConfig& config);

/// A single run with the generator derived from (seed, run_index).
RunStats simulate_run(const SimConfig& config, int run_index);

struct ValidationRow {
  double q = 0.0;
  Regime regime = Regime::saturated;
  double t_sim = 0.0, t_analytic = 0.0, t_rel_err = 0.0, t_ci = 0.0;
  double u_sim = 0.0, u_analytic = 0.0, u_rel_err = 0.0, u_ci = 0.0;
  double ratio_sim = 0.0;       ///< successes / failures before the first death
  double ratio_analytic = 0.0;  ///< p / (1 - p)
  double ratio_ci = 0.0;        ///< 95% half-width on ratio_sim
  double energy_residual = 0.0; ///< worst node over all runs
  StateSlots sim_slots;
  StateCounts analytic_counts;
  bool horizon_hit = false;
};

struct ValidationReport {
  std::vector<ValidationRow> rows;
  double max_rel_error = 0.0;  ///< over lifetime and lifetime throughput
};

ValidationReport validate_against_analytic(const SimConfig& config,
                                           std::span<const double> q_grid);

}  // namespace aloha
