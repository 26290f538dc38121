#include "aloha/cb_analytic.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "aloha/special_fn.hpp"

namespace aloha {
namespace {

constexpr double kMinP = 1e-300;
constexpr double kMaxP = 1.0 - 1e-15;

// G e^{-G} = -p ln p for p = e^{-G}.
double attempt_success_rate(double g) { return g * std::exp(-g); }

template <std::size_t N>
std::array<double, N> solve_dense(std::array<std::array<double, N + 1>, N> a) {
  for (std::size_t col = 0; col < N; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < N; ++r) {
      if (std::abs(a[r][col]) > std::abs(a[pivot][col])) pivot = r;
    }
    if (a[pivot][col] == 0.0) throw std::runtime_error("singular state-count system");
    std::swap(a[col], a[pivot]);
    for (std::size_t r = col + 1; r < N; ++r) {
      const double f = a[r][col] / a[col][col];
      if (f == 0.0) continue;
      for (std::size_t c = col; c <= N; ++c) a[r][c] -= f * a[col][c];
    }
  }
  std::array<double, N> x{};
  for (std::size_t i = N; i-- > 0;) {
    double s = a[i][N];
    for (std::size_t c = i + 1; c < N; ++c) s -= a[i][c] * x[c];
    x[i] = s / a[i][i];
  }
  return x;
}

}  // namespace

std::string_view to_string(Regime r) {
  return r == Regime::unsaturated ? "unsaturated" : "saturated";
}

double attempt_rate_of(double p) { return -std::log(std::clamp(p, kMinP, kMaxP)); }

SteadyRegion steady_interval(const CbParams& p) {
  SteadyRegion r;
  const double load = p.aggregate_rate();
  if (load == 0.0) {
    r.defined = true;
    r.lambert_arg = 0.0;
    r.q_lo = 0.0;
    r.q_hi = 1.0;
    r.p_large = 1.0;
    r.p_small = 0.0;
    return r;
  }
  const double denom = p.m - load * p.hold_extra();
  if (!(denom > 0.0)) return r;
  double a = -load / denom;
  r.lambert_arg = a;
  if (a < kMinusInvE) {
    if (a < kMinusInvE - kBranchPointSlack) return r;
    a = kMinusInvE;
  }
  const double w0 = lambert_w0(a);
  const double wm1 = lambert_wm1(a);
  r.defined = true;
  r.q_lo = std::clamp(-w0 / p.n, 0.0, 1.0);
  r.q_hi = std::clamp(-wm1 / p.n, 0.0, 1.0);
  r.p_large = std::exp(w0);
  r.p_small = std::exp(wm1);
  return r;
}

Regime regime(const CbParams& p, const SteadyRegion& region) {
  if (region.defined && p.q >= region.q_lo && p.q <= region.q_hi) return Regime::unsaturated;
  return Regime::saturated;
}

Regime regime(const CbParams& p) { return regime(p, steady_interval(p)); }

double saturated_throughput(const CbParams& p, double g) {
  if (g <= 0.0) return 0.0;
  const double y = attempt_success_rate(g);
  return p.m * y / (p.n * (1.0 + p.hold_extra() * y));
}

double saturated_lifetime(const CbParams& p, const EnergyProfile& e, double g) {
  if (g <= 0.0) return e.max_lifetime();
  const double y = attempt_success_rate(g);
  const double d = p.hold_extra();
  const double h = (p.n - 1) * e.p_wait + e.p_tx;
  const double num = e.budget * (1.0 + d * y);
  const double den = e.p_wait + h * d * y / p.n + (e.p_tx - e.p_wait) * g / p.n;
  return num / den;
}

double saturated_lifetime_throughput(const CbParams& p, const EnergyProfile& e, double g) {
  if (g <= 0.0) return 0.0;
  const double h = (p.n - 1) * e.p_wait + e.p_tx;
  const double eg = std::exp(g);
  const double den = h * p.hold_extra() / p.m + (e.p_tx - e.p_wait) * eg / p.m +
                     p.n * e.p_wait * eg / (p.m * g);
  return e.budget / den;
}

double unsaturated_lifetime(const CbParams& p, const EnergyProfile& e, double pl) {
  const double per_unit = (1.0 + p.hold_extra() * pl) / (p.m * pl);
  return e.budget / (per_unit * p.lambda * (e.p_tx - e.p_wait) + e.p_wait);
}

double unsaturated_lifetime_throughput(const CbParams& p, const EnergyProfile& e, double pl) {
  if (p.lambda == 0.0) return 0.0;
  const double per_unit = (1.0 + p.hold_extra() * pl) / (p.m * pl);
  return e.budget / (per_unit * (e.p_tx - e.p_wait) + e.p_wait / p.lambda);
}

Evaluation evaluate(const CbParams& p, const EnergyProfile& e) {
  Evaluation out;
  out.region = steady_interval(p);
  out.regime = regime(p, out.region);
  if (out.regime == Regime::unsaturated) {
    out.p_success = out.region.p_large;
    out.throughput = p.lambda;
    out.lifetime = unsaturated_lifetime(p, e, out.region.p_large);
    out.lifetime_throughput = unsaturated_lifetime_throughput(p, e, out.region.p_large);
  } else {
    const double g = p.n * p.q;
    out.p_success = std::exp(-g);
    out.throughput = saturated_throughput(p, g);
    out.lifetime = saturated_lifetime(p, e, g);
    out.lifetime_throughput = saturated_lifetime_throughput(p, e, g);
  }
  return out;
}

double success_prob(const CbParams& p) {
  const SteadyRegion r = steady_interval(p);
  return regime(p, r) == Regime::unsaturated ? r.p_large : std::exp(-p.n * p.q);
}

double node_throughput(const CbParams& p) {
  return regime(p) == Regime::unsaturated ? p.lambda : saturated_throughput(p, p.n * p.q);
}

double lifetime(const CbParams& p, const EnergyProfile& e) { return evaluate(p, e).lifetime; }

double lifetime_throughput(const CbParams& p, const EnergyProfile& e) {
  return evaluate(p, e).lifetime_throughput;
}

StateCounts expected_state_counts(const CbParams& p, const EnergyProfile& e) {
  const SteadyRegion region = steady_interval(p);
  const Regime rg = regime(p, region);
  const double hold = p.m + p.delta;
  StateCounts c;

  if (p.lambda == 0.0 && rg == Regime::unsaturated) {
    c.n_idle = e.max_lifetime();
    return c;
  }

  // Unknowns: n_I, n_W, n_F, n_S, T.
  const double ps = rg == Regime::unsaturated ? region.p_large : std::exp(-p.n * p.q);
  std::array<std::array<double, 6>, 5> a{};
  a[0] = {1.0, 1.0, 1.0, hold, -1.0, 0.0};
  a[1] = {e.p_wait, e.p_wait, e.p_tx, e.p_tx * hold, 0.0, e.budget};
  a[2] = {0.0, 0.0, ps, -(1.0 - ps), 0.0, 0.0};
  if (rg == Regime::saturated) {
    const double mu = saturated_throughput(p, p.n * p.q) / p.m;
    a[3] = {1.0, 0.0, 0.0, 0.0, 0.0, 0.0};
    a[4] = {0.0, mu, mu, mu * hold - 1.0, 0.0, 0.0};
  } else {
    const double busy = region.q_lo / p.q;
    a[3] = {0.0, 0.0, 0.0, p.m, -p.lambda, 0.0};
    a[4] = {0.0, 1.0, 0.0, -(1.0 - p.q) / (p.q * ps) - busy * (p.n - 1) * p.hold_extra(), 0.0,
            0.0};
  }
  const auto x = solve_dense<5>(a);
  c.n_idle = std::max(x[0], 0.0);
  c.n_wait = x[1];
  c.n_failed = x[2];
  c.n_success = x[3];

  const double busy_slots = c.n_wait + c.n_failed + c.n_success * hold;
  c.mu_r = busy_slots > 0.0 ? c.n_success / busy_slots : 0.0;
  if (c.n_success > 0.0) {
    c.rho = p.lambda * busy_slots / (p.m * c.n_success);
  } else {
    c.rho = p.lambda > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
  }
  return c;
}

}  // namespace aloha
