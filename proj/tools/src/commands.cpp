#include "aloha_cli/commands.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <ostream>

#include <json.hpp>

#include "aloha/cb_analytic.hpp"
#include "aloha/comparator.hpp"
#include "aloha/optimizer.hpp"
#include "aloha/pb_analytic.hpp"
#include "aloha/simulator.hpp"
#include "aloha/special_fn.hpp"

#ifndef ALOHA_VERSION
#define ALOHA_VERSION "unknown"
#endif

namespace aloha::cli {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string format_real(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17e", v);
  return buf;
}

std::string format_cell(const Cell& c) {
  struct {
    std::string operator()(double v) const { return format_real(v); }
    std::string operator()(std::int64_t v) const { return std::to_string(v); }
    std::string operator()(const std::string& v) const { return v; }
    std::string operator()(bool v) const { return v ? "true" : "false"; }
  } visitor;
  return std::visit(visitor, c);
}

nlohmann::json json_cell(const Cell& c) {
  struct {
    nlohmann::json operator()(double v) const {
      return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(format_real(v));
    }
    nlohmann::json operator()(std::int64_t v) const { return v; }
    nlohmann::json operator()(const std::string& v) const { return v; }
    nlohmann::json operator()(bool v) const { return v; }
  } visitor;
  return std::visit(visitor, c);
}

Cell integer(long long v) { return static_cast<std::int64_t>(v); }
Cell text(std::string_view s) { return std::string(s); }

std::vector<double> linspace(double from, double to, int points) {
  std::vector<double> out(static_cast<std::size_t>(points));
  for (int i = 0; i < points; ++i) {
    out[static_cast<std::size_t>(i)] = i + 1 == points ? to : from + (to - from) * i / (points - 1);
  }
  return out;
}

std::vector<double> stepped(double from, double to, double step) {
  const double span = (to - from) / step;
  if (span > 1e7) throw ConfigError("grid too large; raise gridstep or give points");
  const int count = static_cast<int>(std::floor(span + 1e-9)) + 1;
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) out.push_back(from + i * step);
  return out;
}

// --- lambertw -------------------------------------------------------------

Outcome cmd_lambertw(const RunConfig& c) {
  Outcome o;
  o.table.columns = {"branch", "x", "w", "residual", "within_tol"};
  const double w = lambert_w(c.branch, c.x);
  const double residual = std::abs(w * std::exp(w) - c.x) / std::max(1.0, std::abs(c.x));
  o.table.rows.push_back({integer(c.branch == WBranch::principal ? 0 : -1), c.x, w, residual,
                          residual <= c.wtol});
  return o;
}

// --- eval -----------------------------------------------------------------

Outcome cmd_eval(const RunConfig& c) {
  Outcome o;
  o.table.columns = {"scheme", "n", "m", "delta", "lambda", "q", "regime", "q_lo", "q_hi",
                     "p_success", "throughput", "lifetime", "lifetime_throughput",
                     "lifetime_throughput_packets"};
  for (double q : c.q) {
    if (c.scheme == Scheme::cb) {
      const CbParams p = c.cb_params(q);
      const Evaluation ev = evaluate(p, c.energy());
      const double packets = c.k ? ev.lifetime_throughput * *c.k / p.m : kNaN;
      o.table.rows.push_back({text("CB"), integer(p.n), p.m, p.delta, p.lambda, q,
                              text(to_string(ev.regime)), ev.region.q_lo, ev.region.q_hi,
                              ev.p_success, ev.throughput, ev.lifetime, ev.lifetime_throughput,
                              packets});
    } else {
      const PbParams p = c.pb_params(q);
      const PbEvaluation ev = pb_eval(p, c.energy());
      o.table.rows.push_back({text("PB"), integer(p.n), 1.0, 0.0, p.lambda, q,
                              text(to_string(ev.regime)), ev.region.q_lo, ev.region.q_hi,
                              ev.p_success, ev.throughput, ev.lifetime, ev.lifetime_throughput,
                              ev.lifetime_throughput});
    }
  }
  return o;
}

// --- optimize / t0 sweep --------------------------------------------------

OptResult optimize_for(const RunConfig& c, double t0) {
  return c.scheme == Scheme::cb ? optimize(c.cb_params(0.0), c.energy(), t0)
                                : optimize(c.pb_params(0.0), c.energy(), t0);
}

const std::vector<std::string> kOptimizeColumns = {
    "scheme", "t0", "feasible", "case", "u_max", "q_lo", "q_hi", "q_opt", "p_opt",
    "regime", "p_m", "lambda_m", "t0_star", "p_c"};

std::vector<Cell> optimize_row(const RunConfig& c, double t0, const OptResult& r) {
  return {text(c.scheme == Scheme::cb ? "CB" : "PB"),
          t0,
          r.feasible,
          text(to_string(r.case_tag)),
          r.u_max,
          r.feasible ? r.q_lo : kNaN,
          r.feasible ? r.q_hi : kNaN,
          r.feasible ? r.q_point() : kNaN,
          r.feasible ? r.p_opt : kNaN,
          text(r.feasible ? to_string(r.regime) : "none"),
          r.thresholds.p_m,
          r.thresholds.lambda_m,
          r.thresholds.t0_star,
          r.thresholds.p_c.value_or(kNaN)};
}

Outcome cmd_optimize(const RunConfig& c) {
  Outcome o;
  o.table.columns = kOptimizeColumns;
  bool all_feasible = true;
  for (double t0 : c.t0) {
    const OptResult r = optimize_for(c, t0);
    all_feasible = all_feasible && r.feasible;
    o.table.rows.push_back(optimize_row(c, t0, r));
  }
  o.summary.emplace_back("feasible", all_feasible);
  if (!all_feasible) {
    o.status = kInfeasible;
    o.message = "infeasible: lifetime target exceeds the idle lifetime E/(sigma P_W) = " +
                format_real(c.energy().max_lifetime()) + " slots";
  }
  return o;
}

Outcome cmd_sweep(const RunConfig& c) {
  Outcome o;
  if (c.var == "t0") {
    const double from = c.from.value_or(0.0);
    const double to = c.to.value_or(c.energy().max_lifetime());
    if (!(to > from) || from < 0.0) throw ConfigError("t0 sweep needs 0 <= from < to");
    o.table.columns = kOptimizeColumns;
    for (double t0 : linspace(from, to, c.points.value_or(101))) {
      o.table.rows.push_back(optimize_row(c, t0, optimize_for(c, t0)));
    }
    return o;
  }
  const double from = c.from.value_or(0.0);
  const double to = c.to.value_or(0.05);
  if (!(to > from) || from < 0.0 || to > 1.0) throw ConfigError("q sweep needs 0 <= from < to <= 1");
  const std::vector<double> qs = c.points ? linspace(from, to, *c.points) : stepped(from, to, c.gridstep);
  o.table.columns = {"q", "regime", "p_success", "throughput", "lifetime", "lifetime_throughput"};
  for (double q : qs) {
    const Evaluation ev = c.scheme == Scheme::cb
                              ? evaluate(c.cb_params(q), c.energy())
                              : evaluate(as_connection_based(c.pb_params(q)), c.energy());
    o.table.rows.push_back({q, text(to_string(ev.regime)), ev.p_success, ev.throughput,
                            ev.lifetime, ev.lifetime_throughput});
  }
  return o;
}

// --- compare / map --------------------------------------------------------

const std::vector<std::string> kMapColumns = {"K", "L_P", "M", "winner", "U_pb",
                                              "U_cb", "lhs", "rhs", "regime"};

std::vector<Cell> map_row(const MapCell& cell) {
  if (!cell.valid) {
    return {integer(cell.k), cell.packet_len, cell.m, text("invalid"), kNaN, kNaN, kNaN, kNaN,
            text("invalid")};
  }
  const ComparisonVerdict& v = cell.verdict;
  return {integer(cell.k), cell.packet_len, cell.m, text(to_string(v.winner)), v.u_pb, v.u_cb,
          v.lhs, v.rhs, text(to_string(v.regime))};
}

MapSpec map_spec(const RunConfig& c) {
  MapSpec s;
  s.n = c.n;
  s.sigma_n = c.sigma_n;
  s.pb_overhead = c.delta_sp;
  s.delta = c.delta;
  s.lambda_n = c.lambda;
  s.energy = c.energy();
  return s;
}

Outcome cmd_compare(const RunConfig& c) {
  if (!c.k || c.lp.size() != 1) throw ConfigError("compare needs k and a single lp");
  MapSpec s = map_spec(c);
  s.ks = {*c.k};
  s.packet_lens = {c.lp.front()};
  const MapCell cell = regime_map(s).front();
  if (!cell.valid) throw ConfigError("k*lp must be at least sigma-n (M >= 1)");
  Outcome o;
  o.table.columns = kMapColumns;
  o.table.rows.push_back(map_row(cell));
  o.summary.emplace_back("inequality_favors_pb", cell.verdict.inequality_favors_pb);
  return o;
}

Outcome cmd_map(const RunConfig& c) {
  MapSpec s = map_spec(c);
  for (int k = 1; k <= c.k_max; ++k) s.ks.push_back(k);
  s.packet_lens = stepped(c.lp_step, c.lp_max, c.lp_step);
  Outcome o;
  o.table.columns = kMapColumns;
  std::int64_t pb = 0, cb = 0;
  for (const MapCell& cell : regime_map(s)) {
    if (cell.valid) (cell.verdict.winner == Winner::pb ? pb : cb) += 1;
    o.table.rows.push_back(map_row(cell));
  }
  o.summary.emplace_back("pb_cells", pb);
  o.summary.emplace_back("cb_or_tie_cells", cb);
  return o;
}

// --- simulate / validate --------------------------------------------------

SimConfig sim_config(const RunConfig& c, double q) {
  SimConfig s;
  s.scheme = c.scheme;
  s.cb = c.cb_params(q);
  s.pb = c.pb_params(q);
  s.energy = c.energy();
  s.seed = c.seed;
  s.runs = c.runs;
  s.slot_cap = c.slot_cap;
  s.threads = c.threads;
  return s;
}

Outcome cmd_simulate(const RunConfig& c) {
  Outcome o;
  o.table.columns = {"scheme", "q", "mean_lifetime", "mean_delivered", "idle_slots",
                     "waiting_slots", "failed_slots", "success_slots", "successes",
                     "collisions", "ci_lifetime", "ci_delivered"};
  bool horizon = false;
  for (double q : c.q) {
    const SimStats st = simulate(sim_config(c, q));
    horizon = horizon || st.horizon_hit;
    o.table.rows.push_back({text(c.scheme == Scheme::cb ? "CB" : "PB"), q, st.mean_lifetime,
                            st.mean_delivered, st.state_slots.idle, st.state_slots.waiting,
                            st.state_slots.failed, st.state_slots.success, st.successes,
                            st.collisions, st.ci_lifetime, st.ci_delivered});
  }
  o.summary.emplace_back("horizon_hit", horizon);
  if (horizon) {
    o.status = kHorizon;
    o.message = "warning: slot cap reached before every node died; statistics are truncated";
  }
  return o;
}

// Both regimes at the default arrival rate, away from the collapse side.
const std::vector<double> kValidationGrid = {0.0001, 0.0002, 0.0004, 0.003,
                                             0.006,  0.01,   0.015,  0.02};

Outcome cmd_validate(const RunConfig& c) {
  const std::vector<double> grid = c.echo.count("q") ? c.q : kValidationGrid;
  const ValidationReport rep = validate_against_analytic(sim_config(c, grid.front()), grid);
  Outcome o;
  o.table.columns = {"q", "regime", "t_sim", "t_analytic", "t_rel_err", "t_ci",
                     "u_sim", "u_analytic", "u_rel_err", "u_ci", "ratio_sim",
                     "ratio_analytic", "ratio_ci", "energy_residual", "horizon_hit"};
  bool horizon = false;
  for (const ValidationRow& r : rep.rows) {
    horizon = horizon || r.horizon_hit;
    o.table.rows.push_back({r.q, text(to_string(r.regime)), r.t_sim, r.t_analytic, r.t_rel_err,
                            r.t_ci, r.u_sim, r.u_analytic, r.u_rel_err, r.u_ci, r.ratio_sim,
                            r.ratio_analytic, r.ratio_ci, r.energy_residual, r.horizon_hit});
  }
  o.summary.emplace_back("max_rel_error", rep.max_rel_error);
  o.summary.emplace_back("horizon_hit", horizon);
  if (horizon) {
    o.status = kHorizon;
    o.message = "warning: slot cap reached before every node died; statistics are truncated";
  }
  return o;
}

// --- casestudy ------------------------------------------------------------

Outcome cmd_casestudy(const RunConfig& c) {
  RaSdtSetting s;
  s.pb_overhead = c.delta_sp;
  s.cb_overhead = c.delta * c.sigma_n;
  s.sigma_n = c.sigma_n;
  s.p_tx = c.pt;
  s.p_wait = c.pw;
  s.n = c.n;
  const ThresholdFit fit = rasdt_fit(s);
  const std::vector<double> lps = c.lp.empty() ? stepped(0.5, 10.0, 0.5) : c.lp;

  Outcome o;
  o.table.columns = {"L_P", "threshold_L_N", "fit_L_N", "fit_rel_err", "threshold_K"};
  for (double lp : lps) {
    const double th = rasdt_threshold(lp, s, c.roottol);
    const double fitted = fit.at(lp);
    o.table.rows.push_back({lp, th, fitted, std::abs(fitted - th) / th, th / lp});
  }
  o.summary.emplace_back("fit_numerator", fit.numerator);
  o.summary.emplace_back("fit_offset", fit.offset);
  return o;
}

}  // namespace

std::string to_csv(const Table& t) {
  std::string out;
  for (std::size_t i = 0; i < t.columns.size(); ++i) {
    if (i) out += ',';
    out += t.columns[i];
  }
  out += '\n';
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += ',';
      out += format_cell(row[i]);
    }
    out += '\n';
  }
  return out;
}

Outcome run(const RunConfig& c) {
  switch (c.command) {
    case Command::lambertw: return cmd_lambertw(c);
    case Command::eval: return cmd_eval(c);
    case Command::optimize: return cmd_optimize(c);
    case Command::compare: return cmd_compare(c);
    case Command::sweep: return cmd_sweep(c);
    case Command::map: return cmd_map(c);
    case Command::simulate: return cmd_simulate(c);
    case Command::validate: return cmd_validate(c);
    case Command::casestudy: return cmd_casestudy(c);
  }
  throw ConfigError("unknown command");
}

std::string json_summary(const RunConfig& c, const Outcome& o) {
  nlohmann::ordered_json doc;
  nlohmann::ordered_json config = nlohmann::ordered_json::object();
  for (const auto& [key, value] : c.echo) config[key] = value;
  doc["meta"] = {{"version", ALOHA_VERSION},
                 {"command", std::string(to_string(c.command))},
                 {"seed", c.seed},
                 {"config", config}};
  doc["columns"] = o.table.columns;
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (const auto& row : o.table.rows) {
    nlohmann::ordered_json obj;
    for (std::size_t i = 0; i < row.size(); ++i) obj[o.table.columns[i]] = json_cell(row[i]);
    rows.push_back(std::move(obj));
  }
  doc["rows"] = std::move(rows);
  nlohmann::ordered_json summary = nlohmann::ordered_json::object();
  for (const auto& [key, value] : o.summary) summary[key] = json_cell(value);
  doc["summary"] = std::move(summary);
  doc["status"] = o.status;
  return doc.dump(2) + "\n";
}

int execute(const RunConfig& c, std::ostream& out, std::ostream& err) {
  Outcome o;
  try {
    o = run(c);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kInvalid;
  }
  const std::string csv = to_csv(o.table);
  if (!c.out.empty()) {
    std::ofstream f(c.out, std::ios::binary);
    if (!f || !(f << csv)) {
      err << "error: cannot write '" << c.out << "'\n";
      return kInvalid;
    }
  } else if (!c.json) {
    out << csv;
  }
  if (c.json) out << json_summary(c, o);
  if (!o.message.empty()) err << o.message << '\n';
  return o.status;
}

}  // namespace aloha::cli
