#include "aloha/comparator.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "aloha/cb_analytic.hpp"
#include "aloha/optimizer.hpp"
#include "aloha/special_fn.hpp"

namespace aloha {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// (L_N sigma_P / sigma_N - sigma_N) / (L_N + sigma_N (delta - 1))
double saturated_lhs(double conn_len, double sigma_p, double sigma_n, double delta) {
  const double num = conn_len * sigma_p / sigma_n - sigma_n;
  const double den = conn_len + sigma_n * (delta - 1.0);
  if (den == 0.0) return num > 0 ? std::numeric_limits<double>::infinity()
                                  : -std::numeric_limits<double>::infinity();
  return num / den;
}

Winner direct_winner(double u_pb, double u_cb) {
  const double scale = std::max(std::abs(u_pb), std::abs(u_cb));
  if (std::abs(u_pb - u_cb) <= kTieTolerance * scale) return Winner::tie;
  return u_pb > u_cb ? Winner::pb : Winner::cb;
}

}  // namespace

std::string_view to_string(Winner w) {
  switch (w) {
    case Winner::pb: return "PB";
    case Winner::cb: return "CB";
    case Winner::tie: return "tie";
  }
  return "?";
}

std::string_view to_string(PairRegime r) {
  switch (r) {
    case PairRegime::both_saturated: return "both_saturated";
    case PairRegime::both_unsaturated: return "both_unsaturated";
    case PairRegime::mixed: return "mixed";
  }
  return "?";
}

double saturated_comparison_rhs(int n, double power_ratio) {
  // Scale-free: divide the mW form through by P_W.
  const double pm = optimal_success_prob(n, power_ratio);
  const double lpm = std::log(pm);
  const double h = (n - 1) + power_ratio;
  return h * pm * lpm / ((power_ratio - 1.0) * lpm - n);
}

namespace {

ComparisonVerdict compare_coupled(const CouplingParams& c, const EnergyProfile& energy, int n) {
  const CoupledParams cp = couple(c, n);
  const EnergyProfile e_pb = rescale_budget(energy, c.sigma_n, cp.pb.sigma);

  const OptResult cb = optimize(cp.cb, energy, 0.0);
  const OptResult pb = optimize(cp.pb, e_pb, 0.0);

  ComparisonVerdict v;
  v.u_cb = cb.u_max;
  v.u_pb = pb.u_max;
  v.winner = direct_winner(v.u_pb, v.u_cb);

  const bool cb_sat = cb.regime == Regime::saturated;
  const bool pb_sat = pb.regime == Regime::saturated;
  if (cb_sat && pb_sat) {
    v.regime = PairRegime::both_saturated;
    v.lhs = saturated_lhs(cp.connection_len, cp.pb.sigma, c.sigma_n, c.delta);
    v.rhs = saturated_comparison_rhs(n, energy.power_ratio());
  } else if (!cb_sat && !pb_sat) {
    v.regime = PairRegime::both_unsaturated;
    const double pl = cb.p_opt;
    const double sn = c.sigma_n;
    v.lhs = cp.connection_len * pl * cp.pb.sigma /
            (sn * sn + (cp.connection_len + sn * (c.delta - 1.0)) * pl * sn);
    v.rhs = std::exp(lambert_w0(-n * cp.pb.lambda));
  } else {
    v.regime = PairRegime::mixed;
    v.lhs = kNaN;
    v.rhs = kNaN;
  }
  v.inequality_favors_pb = v.lhs < v.rhs;
  return v;
}

}  // namespace

ComparisonVerdict pb_beats_cb(const CouplingParams& c, const EnergyProfile& energy, int n,
                              std::optional<PairRegime> declared) {
  validate(energy);
  ComparisonVerdict v = compare_coupled(c, energy, n);
  if (v.regime == PairRegime::mixed) {
    throw std::invalid_argument("schemes are in different regimes; no closed-form comparison");
  }
  if (declared && *declared != v.regime) {
    throw std::invalid_argument("declared regime " + std::string(to_string(*declared)) +
                                " but parameters give " + std::string(to_string(v.regime)));
  }
  return v;
}

std::vector<MapCell> regime_map(const MapSpec& spec) {
  validate(spec.energy);
  std::vector<MapCell> cells;
  cells.reserve(spec.ks.size() * spec.packet_lens.size());
  for (int k : spec.ks) {
    for (double lp : spec.packet_lens) {
      MapCell cell;
      cell.k = k;
      cell.packet_len = lp;
      cell.m = k * lp / spec.sigma_n;
      cell.valid = cell.m >= 1.0 - 1e-12;
      if (cell.valid) {
        CouplingParams c{k, lp, spec.pb_overhead, spec.sigma_n, spec.delta, spec.lambda_n};
        cell.verdict = compare_coupled(c, spec.energy, spec.n);
      } else {
        cell.verdict.lhs = cell.verdict.rhs = kNaN;
        cell.verdict.u_pb = cell.verdict.u_cb = kNaN;
      }
      cells.push_back(cell);
    }
  }
  return cells;
}

ThresholdFit rasdt_fit(const RaSdtSetting& s) {
  // Solving the saturated inequality for L_N:
  //   L_N < sigma_N^2 (1 + R (delta - 1)) / (L_P + Delta_SP - R sigma_N)
  const double r = saturated_comparison_rhs(s.n, s.p_tx / s.p_wait);
  return {s.sigma_n * s.sigma_n * (1.0 + r * (s.delta() - 1.0)),
          s.pb_overhead - r * s.sigma_n};
}

double rasdt_threshold(double packet_len, const RaSdtSetting& s, double rel_tol) {
  if (!(packet_len > 0.0)) throw std::invalid_argument("packet length must be > 0");
  if (!(rel_tol > 0.0)) throw std::invalid_argument("root tolerance must be > 0");
  const double rhs = saturated_comparison_rhs(s.n, s.p_tx / s.p_wait);
  const double sigma_p = packet_len + s.pb_overhead;
  const auto gap = [&](double conn_len) {
    return saturated_lhs(conn_len, sigma_p, s.sigma_n, s.delta()) - rhs;
  };
  // lhs rises monotonically towards sigma_P / sigma_N.
  if (sigma_p / s.sigma_n <= rhs) return std::numeric_limits<double>::infinity();
  double lo = 0.0;
  double hi = s.sigma_n;
  while (gap(hi) < 0.0) hi *= 2.0;
  if (gap(lo) >= 0.0) return 0.0;
  for (int i = 0; i < 400 && hi - lo > rel_tol * hi; ++i) {
    const double mid = 0.5 * (lo + hi);
    (gap(mid) < 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace aloha
