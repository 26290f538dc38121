#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "aloha/model.hpp"
#include "aloha/special_fn.hpp"

namespace aloha::cli {

enum class Command { lambertw, eval, optimize, compare, sweep, map, simulate, validate, casestudy };

std::optional<Command> parse_command(std::string_view name);
std::string_view to_string(Command c);
const std::vector<std::string_view>& command_names();

/// Key -> raw value text, keyed by flag name without the leading dashes.
using Settings = std::map<std::string, std::string>;

/// Bad config file, bad flag value or violated parameter invariant.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Every key accepted in a config file, in flag spelling.
const std::vector<std::string_view>& known_keys();

/// Flat `key = value` text with one pair per line. `#` starts a comment.
/// Underscores in keys are read as dashes.
Settings parse_config_text(std::string_view text);
Settings read_config_file(const std::string& path);

/// Parameters after unit normalization. Inputs carry the physical units named
/// in the flag help; `budget` is E/sigma in mW * slots for the scheme's own
/// slot, which is sigma_N for the comparison commands.
struct RunConfig {
  Command command = Command::eval;
  Scheme scheme = Scheme::cb;
  int n = 100;
  double m = 8.0;
  double delta = 4.0;
  std::optional<int> k;
  std::vector<double> lp;  ///< packet payload lengths, ms
  double sigma_n = 1.0;    ///< ms
  double delta_sp = 0.0;   ///< ms
  double lambda = 0.004;
  std::vector<double> q{0.01};
  double budget = 1e5;
  double pt = 100.0;
  double pw = 1.0;
  std::vector<double> t0{0.0};
  std::uint64_t seed = 1;
  int runs = 20;
  std::int64_t slot_cap = 0;
  unsigned threads = 0;
  std::string out;
  bool json = false;
  double wtol = 1e-12;
  double roottol = 1e-12;
  double gridstep = 1e-5;

  double x = 0.0;
  WBranch branch = WBranch::principal;

  std::string var = "q";
  std::optional<double> from;
  std::optional<double> to;
  std::optional<int> points;

  int k_max = 20;
  double lp_max = 10.0;
  double lp_step = 0.5;

  Settings echo;  ///< resolved key/value pairs, for the JSON meta block

  CbParams cb_params(double q_value) const;
  PbParams pb_params(double q_value) const;
  EnergyProfile energy() const { return {budget, pt, pw}; }
  /// Slot length of the packet-based scheme, ms.
  double pb_slot() const;
};

/// `flags` override `file`, which overrides the command defaults.
RunConfig load_config(Command command, const Settings& file, const Settings& flags);

}  // namespace aloha::cli
