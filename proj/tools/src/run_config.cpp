#include "aloha_cli/run_config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace aloha::cli {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::string normalize_key(std::string_view key) {
  std::string k(trim(key));
  std::replace(k.begin(), k.end(), '_', '-');
  return k;
}

bool is_known(const std::string& key) {
  const auto& keys = known_keys();
  return std::find(keys.begin(), keys.end(), key) != keys.end();
}

// Reference settings used when a key is not given.
Settings defaults_for(Command c) {
  switch (c) {
    case Command::compare:
    case Command::map:
      return {{"n", "100"}, {"sigma-n", "2"}, {"delta-sp", "2"}, {"delta", "4"},
              {"pt", "100"}, {"pw", "1"}, {"lambda", "0.02"}};
    case Command::casestudy:
      return {{"n", "100"}, {"sigma-n", "2"}, {"delta-sp", "6"}, {"delta", "4"},
              {"pt", "300"}, {"pw", "3"}};
    default:
      return {{"scheme", "cb"}, {"n", "100"}, {"m", "8"}, {"delta", "4"},
              {"lambda", "0.004"}, {"pt", "100"}, {"pw", "1"}};
  }
}

class Reader {
 public:
  explicit Reader(const Settings& s) : s_(s) {}

  bool has(const std::string& key) const { return s_.count(key) != 0; }
  const std::string& raw(const std::string& key) const { return s_.at(key); }

  double real(const std::string& key, double fallback) const {
    return has(key) ? parse_real(key, raw(key)) : fallback;
  }

  std::int64_t integer(const std::string& key, std::int64_t fallback) const {
    if (!has(key)) return fallback;
    const std::string_view v = trim(raw(key));
    std::int64_t out = 0;
    auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc{} || ptr != v.data() + v.size()) bad(key, raw(key), "an integer");
    return out;
  }

  std::uint64_t unsigned_integer(const std::string& key, std::uint64_t fallback) const {
    if (!has(key)) return fallback;
    const std::string_view v = trim(raw(key));
    std::uint64_t out = 0;
    auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc{} || ptr != v.data() + v.size()) bad(key, raw(key), "an unsigned integer");
    return out;
  }

  std::vector<double> reals(const std::string& key, std::vector<double> fallback) const {
    if (!has(key)) return fallback;
    std::vector<double> out;
    std::stringstream ss(raw(key));
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(parse_real(key, item));
    if (out.empty()) bad(key, raw(key), "a comma-separated list of numbers");
    return out;
  }

  bool boolean(const std::string& key, bool fallback) const {
    if (!has(key)) return fallback;
    const std::string_view v = trim(raw(key));
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    bad(key, raw(key), "a boolean");
  }

 private:
  static double parse_real(const std::string& key, const std::string& text) {
    const std::string_view v = trim(text);
    double out = 0.0;
    auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc{} || ptr != v.data() + v.size() || !std::isfinite(out)) {
      bad(key, text, "a finite number");
    }
    return out;
  }

  [[noreturn]] static void bad(const std::string& key, const std::string& value,
                               const char* what) {
    throw ConfigError("invalid value '" + value + "' for key '" + key + "': expected " + what);
  }

  const Settings& s_;
};

void require(bool ok, const std::string& message) {
  if (!ok) throw ConfigError(message);
}

}  // namespace

std::optional<Command> parse_command(std::string_view name) {
  const auto& names = command_names();
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (names[i] == name) return static_cast<Command>(i);
  }
  return std::nullopt;
}

const std::vector<std::string_view>& command_names() {
  static const std::vector<std::string_view> names = {
      "lambertw", "eval", "optimize", "compare", "sweep",
      "map", "simulate", "validate", "casestudy"};
  return names;
}

std::string_view to_string(Command c) { return command_names()[static_cast<std::size_t>(c)]; }

const std::vector<std::string_view>& known_keys() {
  static const std::vector<std::string_view> keys = {
      "scheme", "n", "m", "delta", "k", "lp", "sigma-n", "delta-sp", "lambda", "q",
      "energy", "e-over-sigma", "pt", "pw", "t0", "seed", "runs", "out", "json",
      "wtol", "roottol", "gridstep", "x", "branch", "var", "from", "to", "points",
      "k-max", "lp-max", "lp-step", "panel", "slot-cap", "threads"};
  return keys;
}

Settings parse_config_text(std::string_view text) {
  Settings out;
  std::size_t line_no = 0;
  while (!text.empty()) {
    ++line_no;
    const std::size_t nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);

    if (const std::size_t hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = trim(line);
    if (line.empty()) continue;

    const std::size_t eq = line.find('=');
    const std::string where = "line " + std::to_string(line_no);
    if (eq == std::string_view::npos) {
      throw ConfigError(where + ": expected 'key = value', got '" + std::string(line) + "'");
    }
    const std::string key = normalize_key(line.substr(0, eq));
    const std::string_view value = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError(where + ": missing key");
    if (!is_known(key)) throw ConfigError(where + ": unknown key '" + key + "'");
    if (value.empty()) throw ConfigError(where + ": missing value for key '" + key + "'");
    if (out.count(key)) throw ConfigError(where + ": duplicate key '" + key + "'");
    out[key] = std::string(value);
  }
  return out;
}

Settings read_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  try {
    return parse_config_text(buf.str());
  } catch (const ConfigError& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

CbParams RunConfig::cb_params(double q_value) const {
  CbParams p;
  p.n = n;
  p.m = m;
  p.delta = delta;
  p.sigma = sigma_n;
  p.lambda = lambda;
  p.q = q_value;
  return p;
}

PbParams RunConfig::pb_params(double q_value) const {
  PbParams p;
  p.n = n;
  p.sigma = pb_slot();
  p.lambda = lambda;
  p.q = q_value;
  return p;
}

double RunConfig::pb_slot() const { return lp.size() == 1 ? lp.front() + delta_sp : sigma_n; }

RunConfig load_config(Command command, const Settings& file, const Settings& flags) {
  Settings merged = defaults_for(command);
  Settings given;
  for (const Settings* src : {&file, &flags}) {
    for (const auto& [key, value] : *src) {
      if (!is_known(key)) throw ConfigError("unknown key '" + key + "'");
      merged[key] = value;
      given[key] = value;
    }
  }
  const Reader r(merged);
  const Reader explicit_keys(given);

  RunConfig c;
  c.command = command;
  c.echo = merged;

  if (r.has("scheme")) {
    std::string s = r.raw("scheme");
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char ch) { return std::tolower(ch); });
    require(s == "cb" || s == "pb", "invalid value '" + r.raw("scheme") + "' for key 'scheme': expected cb or pb");
    c.scheme = s == "cb" ? Scheme::cb : Scheme::pb;
  }

  const std::int64_t n = r.integer("n", c.n);
  require(n >= 1 && n <= 1'000'000, "n must be in [1, 1e6]");
  c.n = static_cast<int>(n);
  c.m = r.real("m", c.m);
  c.delta = r.real("delta", c.delta);
  if (r.has("k")) {
    const std::int64_t k = r.integer("k", 1);
    require(k >= 1, "k must be >= 1");
    c.k = static_cast<int>(k);
  }
  c.lp = r.reals("lp", {});
  for (double v : c.lp) require(v > 0.0, "lp must be > 0");
  c.sigma_n = r.real("sigma-n", c.sigma_n);
  require(c.sigma_n > 0.0, "sigma-n must be > 0");
  c.delta_sp = r.real("delta-sp", c.delta_sp);
  require(c.delta_sp >= 0.0, "delta-sp must be >= 0");
  c.lambda = r.real("lambda", c.lambda);
  c.pt = r.real("pt", c.pt);
  c.pw = r.real("pw", c.pw);
  c.t0 = r.reals("t0", c.t0);
  for (double v : c.t0) require(v >= 0.0, "t0 must be >= 0");
  c.seed = r.unsigned_integer("seed", c.seed);
  const std::int64_t runs = r.integer("runs", c.runs);
  require(runs >= 1 && runs <= 100'000, "runs must be in [1, 100000]");
  c.runs = static_cast<int>(runs);
  c.slot_cap = r.integer("slot-cap", c.slot_cap);
  require(c.slot_cap >= 0, "slot-cap must be >= 0");
  const std::int64_t threads = r.integer("threads", 0);
  require(threads >= 0 && threads <= 1024, "threads must be in [0, 1024]");
  c.threads = static_cast<unsigned>(threads);
  if (r.has("out")) c.out = r.raw("out");
  c.json = r.boolean("json", false);
  c.wtol = r.real("wtol", c.wtol);
  c.roottol = r.real("roottol", c.roottol);
  c.gridstep = r.real("gridstep", c.gridstep);
  require(c.wtol > 0.0, "wtol must be > 0");
  require(c.roottol > 0.0, "roottol must be > 0");
  require(c.gridstep > 0.0, "gridstep must be > 0");

  c.x = r.real("x", c.x);
  if (r.has("branch")) {
    const std::string b(trim(r.raw("branch")));
    require(b == "0" || b == "-1", "invalid value '" + b + "' for key 'branch': expected 0 or -1");
    c.branch = b == "0" ? WBranch::principal : WBranch::lower;
  }

  if (r.has("var")) c.var = r.raw("var");
  require(c.var == "q" || c.var == "t0", "invalid value '" + c.var + "' for key 'var': expected q or t0");
  if (r.has("from")) c.from = r.real("from", 0.0);
  if (r.has("to")) c.to = r.real("to", 0.0);
  if (r.has("points")) {
    const std::int64_t pts = r.integer("points", 2);
    require(pts >= 2 && pts <= 10'000'000, "points must be in [2, 1e7]");
    c.points = static_cast<int>(pts);
  }

  const std::int64_t k_max = r.integer("k-max", c.k_max);
  require(k_max >= 1 && k_max <= 10'000, "k-max must be in [1, 10000]");
  c.k_max = static_cast<int>(k_max);
  c.lp_max = r.real("lp-max", c.lp_max);
  c.lp_step = r.real("lp-step", c.lp_step);
  require(c.lp_step > 0.0 && c.lp_max >= c.lp_step, "need 0 < lp-step <= lp-max");

  if (command == Command::map && !explicit_keys.has("lambda")) {
    const std::string panel = r.has("panel") ? r.raw("panel") : "saturated";
    require(panel == "saturated" || panel == "unsaturated",
            "invalid value '" + panel + "' for key 'panel': expected saturated or unsaturated");
    c.lambda = panel == "saturated" ? 0.02 : 1e-4;
    c.echo["lambda"] = panel == "saturated" ? "0.02" : "0.0001";
  }

  // Payload duration from K packets of L_P ms when both are given.
  if (command != Command::casestudy && c.k && c.lp.size() == 1) {
    const double derived = *c.k * c.lp.front() / c.sigma_n;
    if (explicit_keys.has("m")) {
      require(std::abs(derived - c.m) <= 1e-12 * std::max(1.0, derived),
              "m conflicts with k*lp/sigma-n = " + std::to_string(derived));
    }
    c.m = derived;
  }

  const bool has_energy = r.has("energy");
  const bool has_scaled = r.has("e-over-sigma");
  require(!(has_energy && has_scaled), "give either energy (mJ) or e-over-sigma, not both");
  if (has_energy) {
    const double mj = r.real("energy", 0.0);
    require(mj > 0.0, "energy must be > 0");
    const bool pb_slot = c.scheme == Scheme::pb &&
                         command != Command::compare && command != Command::map;
    // mJ = 1000 mW*ms; one slot is sigma ms.
    c.budget = 1000.0 * mj / (pb_slot ? c.pb_slot() : c.sigma_n);
  } else {
    c.budget = r.real("e-over-sigma", c.budget);
  }

  if (r.has("q")) c.q = r.reals("q", c.q);

  // Model invariants, checked before dispatch.
  try {
    validate(c.energy());
    if (command == Command::eval || command == Command::optimize || command == Command::sweep ||
        command == Command::simulate || command == Command::validate) {
      for (double q : c.q) {
        if (c.scheme == Scheme::cb) {
          validate(c.cb_params(q));
        } else {
          validate(c.pb_params(q));
        }
      }
    }
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  return c;
}

}  // namespace aloha::cli
