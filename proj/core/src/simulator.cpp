#include "aloha/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <queue>
#include <random>
#include <stdexcept>
#include <thread>

#include "aloha/pb_analytic.hpp"

namespace aloha {
namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

struct Settings {
  int n = 1;
  std::int64_t units_per_request = 1;  // M for CB, 1 for PB
  std::int64_t hold = 1;               // M + delta
  double lambda = 0.0;
  double q = 0.0;
  double budget = 0.0;
  double p_tx = 1.0;
  double p_wait = 1.0;
  std::int64_t cap = 0;
};

bool integral(double v) { return std::abs(v - std::round(v)) <= 1e-9 * std::max(1.0, v); }

Settings settings_of(const SimConfig& c) {
  validate(c.energy);
  if (c.runs < 1) throw std::invalid_argument("runs must be >= 1");
  Settings s;
  if (c.scheme == Scheme::cb) {
    validate(c.cb);
    if (!integral(c.cb.m)) throw std::invalid_argument("simulator requires an integral m");
    if (!integral(c.cb.delta)) throw std::invalid_argument("simulator requires an integral delta");
    s.n = c.cb.n;
    s.units_per_request = static_cast<std::int64_t>(std::llround(c.cb.m));
    s.hold = static_cast<std::int64_t>(std::llround(c.cb.m + c.cb.delta));
    s.lambda = c.cb.lambda;
    s.q = c.cb.q;
  } else {
    validate(c.pb);
    s.n = c.pb.n;
    s.lambda = c.pb.lambda;
    s.q = c.pb.q;
  }
  if (s.lambda > 1.0) throw std::invalid_argument("simulator needs lambda <= 1 (Bernoulli arrivals)");
  s.budget = c.energy.budget;
  s.p_tx = c.energy.p_tx;
  s.p_wait = c.energy.p_wait;
  s.cap = c.slot_cap > 0 ? c.slot_cap
                         : static_cast<std::int64_t>(std::ceil(c.energy.max_lifetime())) + 1;
  return s;
}

struct Node {
  std::int64_t requests = 0;
  std::int64_t units = 0;
  std::int64_t idle = 0;
  std::int64_t waiting = 0;
  std::int64_t failed = 0;
  std::int64_t success_slots = 0;
  std::int64_t successes = 0;
  std::int64_t delivered = 0;
  std::int64_t since = 0;  // first slot not yet tallied
  std::int64_t lifetime = 0;
  std::uint32_t version = 0;
  int busy_pos = -1;
  bool alive = true;
  bool in_block = false;
};

struct Event {
  std::int64_t slot;
  int node;
  std::uint32_t version;
  bool operator>(const Event& o) const {
    return slot != o.slot ? slot > o.slot : node > o.node;
  }
};

using EventQueue = std::priority_queue<Event, std::vector<Event>, std::greater<Event>>;

class Run {
 public:
  Run(const Settings& s, std::uint64_t seed)
      : s_(s), nodes_(static_cast<std::size_t>(s.n)), rng_(seed), tx_(s.q) {
    if (s_.lambda > 0.0 && s_.lambda < 1.0) {
      gap_ = std::geometric_distribution<std::int64_t>(s_.lambda);
    }
    alive_ = s_.n;
    for (int i = 0; i < s_.n; ++i) {
      schedule_arrival(i, -1);
      schedule_death(i);
    }
  }

  RunStats execute() {
    std::int64_t t = 0;
    std::vector<int> transmitters;
    while (alive_ > 0 && t < s_.cap) {
      settle(t);
      if (alive_ == 0) break;
      if (busy_.empty() || s_.q == 0.0) {
        t = std::min(next_event_slot(), s_.cap);
        continue;
      }

      transmitters.clear();
      for (int i : busy_) {
        if (tx_(rng_)) transmitters.push_back(i);
      }
      if (transmitters.size() == 1) {
        t = run_connection(transmitters.front(), t);
        continue;
      }
      if (alive_ == s_.n) full_failures_ += static_cast<std::int64_t>(transmitters.size());
      for (int i : transmitters) fail_attempt(i, t);
      ++t;
    }
    if (alive_ > 0) settle(t);

    RunStats out;
    out.elapsed_slots = t;
    out.horizon_hit = alive_ > 0;
    out.total_failures = failures_;
    out.aborted = aborted_;
    out.channel_held_slots = held_;
    out.full_population_successes = full_successes_;
    out.full_population_failures = full_failures_;
    // Integer sums first so that identical nodes average exactly.
    std::int64_t life = 0, delivered = 0, idle = 0, waiting = 0, failed = 0, success = 0;
    for (auto& nd : nodes_) {
      if (nd.alive) {
        flush(nd, std::max(t, nd.since));
        nd.lifetime = std::max(t, nd.since);
      } else {
        out.max_energy_residual =
            std::max(out.max_energy_residual, std::abs(energy(nd) - s_.budget));
      }
      const std::int64_t tallied = nd.idle + nd.waiting + nd.failed + nd.success_slots;
      if (tallied != nd.lifetime) ++out.slot_identity_violations;
      if (nd.delivered != s_.units_per_request * nd.successes) ++out.conservation_violations;
      out.total_successes += nd.successes;
      life += nd.lifetime;
      delivered += nd.delivered;
      idle += nd.idle;
      waiting += nd.waiting;
      failed += nd.failed;
      success += nd.success_slots;
    }
    const double n = s_.n;
    out.mean_lifetime = static_cast<double>(life) / n;
    out.mean_delivered = static_cast<double>(delivered) / n;
    out.slots = {static_cast<double>(idle) / n, static_cast<double>(waiting) / n,
                 static_cast<double>(failed) / n, static_cast<double>(success) / n};
    out.successes = static_cast<double>(out.total_successes) / n;
    out.collisions = static_cast<double>(failures_) / n;
    return out;
  }

 private:
  double energy_with(const Node& nd, std::int64_t passive_extra, std::int64_t tx_extra) const {
    return s_.p_wait * static_cast<double>(nd.idle + nd.waiting + passive_extra) +
           s_.p_tx * static_cast<double>(nd.failed + nd.success_slots + tx_extra);
  }
  double energy(const Node& nd) const { return energy_with(nd, 0, 0); }

  // Smallest j >= 1 such that j more slots at the given power exhaust the budget.
  std::int64_t slots_to_exhaustion(const Node& nd, bool transmitting) const {
    const double power = transmitting ? s_.p_tx : s_.p_wait;
    const auto after = [&](std::int64_t j) {
      return transmitting ? energy_with(nd, 0, j) : energy_with(nd, j, 0);
    };
    const double remaining = s_.budget - energy(nd);
    std::int64_t j = remaining <= 0.0
                         ? 1
                         : std::max<std::int64_t>(1, static_cast<std::int64_t>(std::ceil(remaining / power)));
    while (j > 1 && after(j - 1) >= s_.budget) --j;
    while (after(j) < s_.budget) ++j;
    return j;
  }

  void flush(Node& nd, std::int64_t until) {
    const std::int64_t span = until - nd.since;
    if (span <= 0) return;
    (nd.requests > 0 ? nd.waiting : nd.idle) += span;
    nd.since = until;
  }

  void busy_add(int i) {
    Node& nd = nodes_[i];
    if (nd.busy_pos >= 0) return;
    nd.busy_pos = static_cast<int>(busy_.size());
    busy_.push_back(i);
  }

  void busy_remove(int i) {
    Node& nd = nodes_[i];
    if (nd.busy_pos < 0) return;
    const int last = busy_.back();
    busy_[nd.busy_pos] = last;
    nodes_[last].busy_pos = nd.busy_pos;
    busy_.pop_back();
    nd.busy_pos = -1;
  }

  void schedule_arrival(int i, std::int64_t after) {
    if (s_.lambda <= 0.0) return;
    const std::int64_t skip = s_.lambda >= 1.0 ? 0 : gap_(rng_);
    arrivals_.push({after + 1 + skip, i, 0});
  }

  void schedule_death(int i) {
    Node& nd = nodes_[i];
    ++nd.version;
    deaths_.push({nd.since + slots_to_exhaustion(nd, false) - 1, i, nd.version});
  }

  void kill(int i, std::int64_t slot) {
    Node& nd = nodes_[i];
    nd.alive = false;
    nd.lifetime = slot + 1;
    ++nd.version;
    busy_remove(i);
    --alive_;
  }

  void drop_stale() {
    while (!deaths_.empty()) {
      const Event& e = deaths_.top();
      const Node& nd = nodes_[e.node];
      if (nd.alive && !nd.in_block && nd.version == e.version) break;
      deaths_.pop();
    }
    while (!arrivals_.empty() && !nodes_[arrivals_.top().node].alive) arrivals_.pop();
  }

  // First slot after `t` at which something happens: an arrival becomes
  // usable, or a node has died at the end of the previous slot.
  std::int64_t next_event_slot() {
    drop_stale();
    std::int64_t next = s_.cap;
    if (!deaths_.empty()) next = std::min(next, deaths_.top().slot + 1);
    if (!arrivals_.empty()) next = std::min(next, arrivals_.top().slot);
    return next;
  }

  // Brings every node up to the start of slot t: arrivals in slots <= t
  // (usable in the slot they arrive) and deaths at the end of slots < t.
  // Within one slot the arrival comes first.
  void settle(std::int64_t t) {
    for (;;) {
      drop_stale();
      const bool has_death = !deaths_.empty() && deaths_.top().slot < t;
      const bool has_arrival = !arrivals_.empty() && arrivals_.top().slot <= t;
      if (!has_death && !has_arrival) return;
      if (has_death && (!has_arrival || deaths_.top().slot < arrivals_.top().slot)) {
        const Event e = deaths_.top();
        deaths_.pop();
        flush(nodes_[e.node], e.slot + 1);
        kill(e.node, e.slot);
      } else {
        const Event e = arrivals_.top();
        arrivals_.pop();
        on_arrival(e.node, e.slot);
      }
    }
  }

  void on_arrival(int i, std::int64_t slot) {
    Node& nd = nodes_[i];
    if (++nd.units >= s_.units_per_request) {
      nd.units = 0;
      if (nd.requests == 0 && !nd.in_block) {
        flush(nd, slot);
        busy_add(i);
      }
      ++nd.requests;
    }
    schedule_arrival(i, slot);
  }

  void fail_attempt(int i, std::int64_t t) {
    Node& nd = nodes_[i];
    flush(nd, t);
    ++nd.failed;
    ++failures_;
    nd.since = t + 1;
    if (energy(nd) >= s_.budget) {
      kill(i, t);
    } else {
      schedule_death(i);
    }
  }

  // Sole transmitter at slot t holds the channel for `hold` slots, or until
  // its battery runs out. Returns the first slot after the connection.
  std::int64_t run_connection(int w, std::int64_t t) {
    Node& nd = nodes_[w];
    if (alive_ == s_.n) ++full_successes_;
    flush(nd, t);
    busy_remove(w);
    nd.in_block = true;
    ++nd.version;

    const std::int64_t affordable = slots_to_exhaustion(nd, true);
    const bool completes = affordable >= s_.hold;
    const std::int64_t len = completes ? s_.hold : affordable;
    const std::int64_t end = t + len - 1;
    held_ += len;

    // Other nodes' events inside the block wait for the next settle(); none
    // of them can touch the channel before end + 1.
    nd.in_block = false;
    nd.success_slots += len;
    nd.since = end + 1;
    if (completes) {
      ++nd.successes;
      nd.delivered += s_.units_per_request;
      --nd.requests;
    } else {
      ++aborted_;
    }
    if (energy(nd) >= s_.budget) {
      kill(w, end);
    } else {
      if (nd.requests > 0) busy_add(w);
      schedule_death(w);
    }
    return end + 1;
  }

  Settings s_;
  std::vector<Node> nodes_;
  std::vector<int> busy_;
  EventQueue arrivals_;
  EventQueue deaths_;
  std::mt19937_64 rng_;
  std::bernoulli_distribution tx_;
  std::geometric_distribution<std::int64_t> gap_;
  int alive_ = 0;
  std::int64_t failures_ = 0;
  std::int64_t aborted_ = 0;
  std::int64_t held_ = 0;
  std::int64_t full_successes_ = 0;
  std::int64_t full_failures_ = 0;
};

double ci95(const std::vector<double>& xs) {
  if (xs.size() < 2) return 0.0;
  double mean = 0.0;
  for (double x : xs) mean += x;
  mean /= static_cast<double>(xs.size());
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  const double sd = std::sqrt(ss / static_cast<double>(xs.size() - 1));
  return 1.96 * sd / std::sqrt(static_cast<double>(xs.size()));
}

double rel_err(double sim, double ref) {
  if (ref == 0.0) return std::abs(sim);
  return std::abs(sim - ref) / std::abs(ref);
}

}  // namespace

RunStats simulate_run(const SimConfig& config, int run_index) {
  const Settings s = settings_of(config);
  const std::uint64_t seed =
      splitmix64(config.seed ^ splitmix64(static_cast<std::uint64_t>(run_index) + 1));
  return Run(s, seed).execute();
}

SimStats simulate(const SimConfig& config) {
  settings_of(config);
  std::vector<RunStats> runs(static_cast<std::size_t>(config.runs));
  unsigned workers = config.threads ? config.threads : std::thread::hardware_concurrency();
  workers = std::clamp<unsigned>(workers, 1, static_cast<unsigned>(config.runs));
  {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        for (int r = static_cast<int>(w); r < config.runs; r += static_cast<int>(workers)) {
          runs[static_cast<std::size_t>(r)] = simulate_run(config, r);
        }
      });
    }
  }

  SimStats out;
  out.scheme = config.scheme;
  out.q = config.scheme == Scheme::cb ? config.cb.q : config.pb.q;
  std::vector<double> lifetimes, delivered;
  for (const RunStats& r : runs) {
    out.mean_lifetime += r.mean_lifetime;
    out.mean_delivered += r.mean_delivered;
    out.state_slots.idle += r.slots.idle;
    out.state_slots.waiting += r.slots.waiting;
    out.state_slots.failed += r.slots.failed;
    out.state_slots.success += r.slots.success;
    out.successes += r.successes;
    out.collisions += r.collisions;
    out.horizon_hit = out.horizon_hit || r.horizon_hit;
    lifetimes.push_back(r.mean_lifetime);
    delivered.push_back(r.mean_delivered);
  }
  const double runs_d = config.runs;
  for (double* v : {&out.mean_lifetime, &out.mean_delivered, &out.state_slots.idle,
                    &out.state_slots.waiting, &out.state_slots.failed, &out.state_slots.success,
                    &out.successes, &out.collisions}) {
    *v /= runs_d;
  }
  out.ci_lifetime = ci95(lifetimes);
  out.ci_delivered = ci95(delivered);
  out.runs = std::move(runs);
  return out;
}

ValidationReport validate_against_analytic(const SimConfig& config,
                                           std::span<const double> q_grid) {
  if (q_grid.empty()) throw std::invalid_argument("q grid must not be empty");
  ValidationReport report;
  for (double q : q_grid) {
    SimConfig c = config;
    CbParams analytic = c.scheme == Scheme::cb ? c.cb : as_connection_based(c.pb);
    c.cb.q = q;
    c.pb.q = q;
    analytic.q = q;
    const SimStats st = simulate(c);
    const Evaluation ev = evaluate(analytic, c.energy);

    ValidationRow row;
    row.q = q;
    row.regime = ev.regime;
    row.t_sim = st.mean_lifetime;
    row.t_analytic = ev.lifetime;
    row.t_rel_err = rel_err(st.mean_lifetime, ev.lifetime);
    row.t_ci = st.ci_lifetime;
    row.u_sim = st.mean_delivered;
    row.u_analytic = ev.lifetime_throughput;
    row.u_rel_err = rel_err(st.mean_delivered, ev.lifetime_throughput);
    row.u_ci = st.ci_delivered;
    row.sim_slots = st.state_slots;
    row.analytic_counts = expected_state_counts(analytic, c.energy);
    row.horizon_hit = st.horizon_hit;

    double succ = 0.0, fail = 0.0;
    for (const RunStats& r : st.runs) {
      succ += static_cast<double>(r.full_population_successes);
      fail += static_cast<double>(r.full_population_failures);
      row.energy_residual = std::max(row.energy_residual, r.max_energy_residual);
    }
    const double attempts = succ + fail;
    row.ratio_analytic = ev.p_success / (1.0 - ev.p_success);
    if (fail > 0.0 && attempts > 0.0) {
      const double ph = succ / attempts;
      row.ratio_sim = succ / fail;
      row.ratio_ci = 1.96 * std::sqrt(ph * (1.0 - ph) / attempts) / ((1.0 - ph) * (1.0 - ph));
    } else {
      row.ratio_sim = std::numeric_limits<double>::infinity();
    }
    report.max_rel_error = std::max({report.max_rel_error, row.t_rel_err, row.u_rel_err});
    report.rows.push_back(row);
  }
  return report;
}

}  // namespace aloha
