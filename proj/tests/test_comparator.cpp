#include <doctest.h>

#include <cmath>
#include <map>
#include <stdexcept>

#include "aloha/comparator.hpp"
#include "aloha/optimizer.hpp"
#include "oracles.hpp"

using namespace aloha;

namespace {

MapSpec map_spec(double lambda_n) {
  MapSpec s;
  for (int k = 1; k <= 10; ++k) s.ks.push_back(k);
  for (int i = 1; i <= 20; ++i) s.packet_lens.push_back(0.5 * i);
  s.lambda_n = lambda_n;
  s.energy = {1e5, 100.0, 1.0};
  return s;
}

int cb_wins(const std::vector<MapCell>& cells) {
  int count = 0;
  for (const MapCell& c : cells) count += c.valid && c.verdict.winner == Winner::cb;
  return count;
}

}  // namespace

TEST_CASE("saturated right-hand side") {
  CHECK(saturated_comparison_rhs(100, 100.0) == doctest::Approx(0.4113).epsilon(1e-4));
  for (double c : {0.1, 3.0, 1e4}) {
    CHECK(saturated_comparison_rhs(100, (c * 300.0) / (c * 3.0)) ==
          doctest::Approx(saturated_comparison_rhs(100, 100.0)).epsilon(1e-14));
  }
  const double pm = oracle::p_m(100, 100.0);
  const double direct = (99.0 + 100.0) * pm * std::log(pm) / (99.0 * std::log(pm) - 100.0);
  CHECK(saturated_comparison_rhs(100, 100.0) == doctest::Approx(direct).epsilon(1e-12));
}

TEST_CASE("vanishing overheads approach a tie") {
  const EnergyProfile e{1e5, 100.0, 1.0};
  const ComparisonVerdict v = pb_beats_cb({1, 2.0, 1e-9, 2.0, 0.0, 0.02}, e, 100);
  CHECK(v.regime == PairRegime::both_saturated);
  CHECK(oracle::rel(v.u_pb, v.u_cb) < 1e-8);
  CHECK(v.winner == Winner::tie);
}

TEST_CASE("regime mismatches are errors") {
  const EnergyProfile e{1e5, 100.0, 1.0};
  const CouplingParams sat{4, 1.0, 2.0, 2.0, 4.0, 0.02};
  CHECK_NOTHROW(pb_beats_cb(sat, e, 100, PairRegime::both_saturated));
  CHECK_THROWS_AS(pb_beats_cb(sat, e, 100, PairRegime::both_unsaturated), std::invalid_argument);

  // Find a coupling whose two networks straddle their saturation boundaries.
  bool found_mixed = false;
  for (double lambda = 1e-4; lambda < 0.05 && !found_mixed; lambda *= 1.05) {
    const std::vector<MapCell> cells = regime_map([&] {
      MapSpec s = map_spec(lambda);
      s.ks = {4};
      s.packet_lens = {5.0};
      return s;
    }());
    if (cells[0].verdict.regime == PairRegime::mixed) {
      found_mixed = true;
      CHECK(std::isnan(cells[0].verdict.lhs));
      CHECK_THROWS_AS(pb_beats_cb({4, 5.0, 2.0, 2.0, 4.0, lambda}, e, 100), std::invalid_argument);
    }
  }
  CHECK(found_mixed);
}

TEST_CASE("single cell map agrees with the direct comparison") {
  for (double lambda : {1e-4, 0.02}) {
    MapSpec s = map_spec(lambda);
    s.ks = {3};
    s.packet_lens = {1.5};
    const MapCell cell = regime_map(s).at(0);
    const ComparisonVerdict v = pb_beats_cb({3, 1.5, 2.0, 2.0, 4.0, lambda}, s.energy, 100);
    CHECK(cell.verdict.winner == v.winner);
    CHECK(cell.verdict.u_pb == v.u_pb);
    CHECK(cell.verdict.u_cb == v.u_cb);
    CHECK(cell.verdict.lhs == v.lhs);
  }
}

TEST_CASE("cells below one request slot are invalid") {
  MapSpec s = map_spec(0.02);
  s.ks = {1};
  s.packet_lens = {0.5, 2.0};
  const std::vector<MapCell> cells = regime_map(s);
  CHECK_FALSE(cells[0].valid);
  CHECK(std::isnan(cells[0].verdict.u_pb));
  CHECK(cells[1].valid);
  CHECK(cells[1].m == 1.0);
}

TEST_CASE("inequality and direct optimum agree on the map") {
  for (double lambda : {1e-4, 0.02}) {
    for (const MapCell& c : regime_map(map_spec(lambda))) {
      if (!c.valid || c.verdict.regime == PairRegime::mixed) continue;
      if (oracle::rel(c.verdict.u_pb, c.verdict.u_cb) < 1e-9) continue;
      CHECK(c.verdict.inequality_favors_pb == (c.verdict.winner == Winner::pb));
    }
  }
}

TEST_CASE("unsaturated panel: small K needs long packets for CB") {
  const std::vector<MapCell> cells = regime_map(map_spec(1e-4));
  std::map<int, std::vector<const MapCell*>> rows;
  for (const MapCell& c : cells) {
    if (c.valid) rows[c.k].push_back(&c);
  }
  for (int k : {1, 2}) {
    const auto& row = rows.at(k);
    CHECK(row.front()->verdict.winner == Winner::pb);
    bool cb_seen = false;
    for (const MapCell* c : row) {
      CHECK(c->verdict.regime == PairRegime::both_unsaturated);
      if (c->verdict.winner == Winner::cb) cb_seen = true;
      if (cb_seen) CHECK(c->verdict.winner == Winner::cb);
    }
  }
}

TEST_CASE("saturated panel: CB wins an up-closed set of K") {
  const MapSpec spec = map_spec(0.02);
  const std::vector<MapCell> cells = regime_map(spec);
  for (double lp : spec.packet_lens) {
    bool cb_seen = false;
    for (const MapCell& c : cells) {
      if (c.packet_len != lp || !c.valid) continue;
      CHECK(c.verdict.regime == PairRegime::both_saturated);
      if (c.verdict.winner == Winner::cb) cb_seen = true;
      if (cb_seen) CHECK(c.verdict.winner == Winner::cb);
    }
  }
  CHECK(cb_wins(cells) > cb_wins(regime_map(map_spec(1e-4))));
}

TEST_CASE("small data threshold") {
  CHECK(rasdt_threshold(0.5) == doctest::Approx(1.57).epsilon(2e-3));
  const ThresholdFit fit = rasdt_fit();
  CHECK(fit.numerator == doctest::Approx(8.9356).epsilon(1e-4));
  CHECK(fit.offset == doctest::Approx(5.1774).epsilon(1e-4));
  CHECK(rasdt_threshold(1e-9) == doctest::Approx(8.9356 / 5.1774).epsilon(1e-3));
  for (double lp = 0.05; lp <= 10.0; lp += 0.05) {
    CHECK(rasdt_threshold(lp) == doctest::Approx(fit.at(lp)).epsilon(1e-9));
    CHECK(rasdt_threshold(lp) == doctest::Approx(8.9356 / (lp + 5.1774)).epsilon(1e-3));
  }
  CHECK(rasdt_threshold(2.0, {}, 1e-3) == doctest::Approx(fit.at(2.0)).epsilon(2e-3));
  CHECK_THROWS_AS(rasdt_threshold(0.0), std::invalid_argument);
  CHECK_THROWS_AS(rasdt_threshold(1.0, {}, 0.0), std::invalid_argument);
}

TEST_CASE("winner names") {
  CHECK(to_string(Winner::pb) == "PB");
  CHECK(to_string(PairRegime::both_saturated) == "both_saturated");
}
