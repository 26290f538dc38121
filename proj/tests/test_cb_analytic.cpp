#include <doctest.h>

#include <cmath>

#include "aloha/cb_analytic.hpp"
#include "aloha/special_fn.hpp"
#include "oracles.hpp"

using namespace aloha;

namespace {

CbParams reference(double q) { return {100, 8.0, 4.0, 1.0, 0.004, q}; }
const EnergyProfile kReferenceEnergy{1e5, 100.0, 1.0};

}  // namespace

TEST_CASE("empty traffic is always steady") {
  const SteadyRegion r = steady_interval({100, 8.0, 4.0, 1.0, 0.0, 0.3});
  CHECK(r.defined);
  CHECK(r.q_lo == 0.0);
  CHECK(r.q_hi == 1.0);
  CHECK(r.p_large == 1.0);
  CHECK(success_prob({100, 8.0, 4.0, 1.0, 0.0, 0.3}) == 1.0);
}

TEST_CASE("branch point: the interval collapses to 1/n") {
  const int n = 50;
  const double m = 3.0, delta = 2.0;
  const double load = m / (std::exp(1.0) + m + delta - 1.0);
  const SteadyRegion r = steady_interval({n, m, delta, 1.0, load / n, 0.0});
  REQUIRE(r.defined);
  CHECK(r.lambert_arg == doctest::Approx(kMinusInvE).epsilon(1e-14));
  CHECK(r.q_lo == doctest::Approx(1.0 / n).epsilon(1e-6));
  CHECK(r.q_hi == doctest::Approx(1.0 / n).epsilon(1e-6));
  CHECK(r.p_large == doctest::Approx(std::exp(-1.0)).epsilon(1e-6));
  CHECK(r.p_small == doctest::Approx(std::exp(-1.0)).epsilon(1e-6));
}

TEST_CASE("reference setting interval") {
  const SteadyRegion r = steady_interval(reference(0.0));
  REQUIRE(r.defined);
  const oracle::Net net{100, 8.0, 4.0, 0.004, 1e5, 100.0, 1.0};
  const oracle::Region o = oracle::region(net);
  CHECK(r.q_lo == doctest::Approx(o.q_lo).epsilon(1e-10));
  CHECK(r.q_hi == doctest::Approx(o.q_hi).epsilon(1e-10));
  CHECK(r.q_lo < r.q_hi);
  CHECK(r.p_large > std::exp(-1.0));
  CHECK(r.p_small <= r.p_large);
}

TEST_CASE("overload leaves the region undefined and forces saturation") {
  const CbParams p{100, 8.0, 4.0, 1.0, 0.05, 0.05};
  CHECK_FALSE(steady_interval(p).defined);
  CHECK(regime(p) == Regime::saturated);
  CHECK(success_prob(p) == doctest::Approx(std::exp(-5.0)).epsilon(1e-14));
}

TEST_CASE("closed interval selects the unsaturated branch") {
  const SteadyRegion r = steady_interval(reference(0.0));
  CHECK(regime(reference(r.q_lo)) == Regime::unsaturated);
  CHECK(regime(reference(r.q_hi)) == Regime::unsaturated);
  CHECK(regime(reference(0.5 * (r.q_lo + r.q_hi))) == Regime::unsaturated);
  CHECK(regime(reference(r.q_lo * 0.99)) == Regime::saturated);
  CHECK(node_throughput(reference(0.5 * (r.q_lo + r.q_hi))) == 0.004);
}

TEST_CASE("collision collapse and silence") {
  CHECK(node_throughput(reference(1.0)) < 1e-30);
  CHECK(node_throughput(reference(1.0)) >= 0.0);
  CHECK(node_throughput(reference(0.0)) == 0.0);
  CHECK(lifetime(reference(0.0), kReferenceEnergy) == 1e5);
  CHECK(lifetime_throughput(reference(0.0), kReferenceEnergy) == 0.0);
}

TEST_CASE("equal powers pin the lifetime") {
  const EnergyProfile flat{5000.0, 2.0, 2.0};
  for (double q : {0.0, 1e-4, 0.01, 0.2, 1.0}) {
    CHECK(lifetime(reference(q), flat) == doctest::Approx(2500.0).epsilon(1e-12));
  }
  const SteadyRegion r = steady_interval(reference(0.0));
  CHECK(lifetime_throughput(reference(r.q_lo), flat) == doctest::Approx(0.004 * 2500.0).epsilon(1e-12));
}

TEST_CASE("branch values match the oracle") {
  const oracle::Net net{100, 8.0, 4.0, 0.004, 1e5, 100.0, 1.0};
  for (double q : {1e-4, 3e-4, 0.003, 0.01, 0.03, 0.08, 0.3}) {
    const Evaluation ev = evaluate(reference(q), kReferenceEnergy);
    const oracle::Point o = oracle::at_q(net, oracle::region(net), q);
    CHECK(ev.lifetime == doctest::Approx(o.t).epsilon(1e-10));
    CHECK(ev.lifetime_throughput == doctest::Approx(o.u).epsilon(1e-10));
    CHECK(ev.lifetime_throughput == doctest::Approx(ev.throughput * ev.lifetime).epsilon(1e-9));
  }
}

TEST_CASE("linear in the energy budget") {
  for (double q : {2e-4, 0.005, 0.05}) {
    for (double c : {0.5, 3.0, 1e3}) {
      CHECK(lifetime(reference(q), kReferenceEnergy.scaled(c)) ==
            doctest::Approx(c * lifetime(reference(q), kReferenceEnergy)).epsilon(1e-14));
      CHECK(lifetime_throughput(reference(q), kReferenceEnergy.scaled(c)) ==
            doctest::Approx(c * lifetime_throughput(reference(q), kReferenceEnergy)).epsilon(1e-14));
    }
  }
}

TEST_CASE("saturated lifetime grows with the success probability") {
  const CbParams p = reference(0.0);
  double prev = 0.0;
  for (double pn = 0.01; pn < 0.999; pn += 0.01) {
    const double t = saturated_lifetime(p, kReferenceEnergy, attempt_rate_of(pn));
    CHECK(t > prev);
    prev = t;
  }
}

TEST_CASE("lifetime non-increasing in q and U has an interior maximum") {
  double prev_t = 1e300;
  double best_u = 0.0, best_q = 0.0;
  const double first_q = 1e-5, last_q = 0.2;
  for (double q = first_q; q <= last_q; q *= 1.05) {
    const Evaluation ev = evaluate(reference(q), kReferenceEnergy);
    CHECK(ev.lifetime <= prev_t * (1.0 + 1e-12));
    prev_t = ev.lifetime;
    if (ev.lifetime_throughput > best_u) {
      best_u = ev.lifetime_throughput;
      best_q = q;
    }
  }
  CHECK(best_q > first_q * 1.05);
  CHECK(best_q < last_q / 1.05);
}

TEST_CASE("branches agree at the lower endpoint") {
  for (int n : {10, 100, 500}) {
    for (double lambda : {1e-4, 1e-3}) {
      const CbParams p{n, 4.0, 2.0, 1.0, lambda, 0.0};
      const SteadyRegion r = steady_interval(p);
      REQUIRE(r.defined);
      const double g = n * r.q_lo;
      CHECK(saturated_lifetime(p, kReferenceEnergy, g) ==
            doctest::Approx(unsaturated_lifetime(p, kReferenceEnergy, r.p_large)).epsilon(1e-9));
      CHECK(saturated_lifetime_throughput(p, kReferenceEnergy, g) ==
            doctest::Approx(unsaturated_lifetime_throughput(p, kReferenceEnergy, r.p_large))
                .epsilon(1e-9));
    }
  }
}

TEST_CASE("attempt rate clamps its argument") {
  CHECK(attempt_rate_of(1.0) > 0.0);
  CHECK(std::isfinite(attempt_rate_of(0.0)));
  CHECK(attempt_rate_of(std::exp(-2.0)) == doctest::Approx(2.0).epsilon(1e-15));
}

TEST_CASE("state counts close both balance identities") {
  const auto check = [](const CbParams& p, const EnergyProfile& e) {
    const StateCounts s = expected_state_counts(p, e);
    const double t = lifetime(p, e);
    CHECK(s.slots(p.m, p.delta) == doctest::Approx(t).epsilon(1e-9));
    const double energy = e.p_wait * (s.n_idle + s.n_wait) +
                          e.p_tx * (s.n_failed + s.n_success * (p.m + p.delta));
    CHECK(energy == doctest::Approx(e.budget).epsilon(1e-9));
    CHECK(s.n_idle >= 0.0);
    CHECK(s.n_wait >= -1e-9 * t);
    CHECK(s.n_failed >= 0.0);
    if (s.n_failed > 0.0) {
      const double pn = success_prob(p);
      CHECK(s.n_success / s.n_failed == doctest::Approx(pn / (1.0 - pn)).epsilon(1e-9));
    }
    return s;
  };
  for (double q : {1e-4, 5e-4, 0.003, 0.01, 0.05, 0.5}) check(reference(q), kReferenceEnergy);
  check({20, 2.0, 0.0, 1.0, 0.01, 0.04}, {3000.0, 10.0, 2.0});
  check({7, 1.0, 0.0, 1.0, 0.3, 0.9}, {100.0, 5.0, 5.0});

  const StateCounts idle = check({100, 8.0, 4.0, 1.0, 0.0, 0.01}, kReferenceEnergy);
  CHECK(idle.n_idle == doctest::Approx(1e5).epsilon(1e-12));
  CHECK(idle.n_wait == 0.0);
  CHECK(idle.n_failed == 0.0);
  CHECK(idle.n_success == 0.0);

  const StateCounts sat = expected_state_counts(reference(0.05), kReferenceEnergy);
  CHECK(sat.n_idle == 0.0);
}
