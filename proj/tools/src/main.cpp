#include <cstdlib>
#include <iostream>
#include <map>
#include <string>

#include <unistd.h>

#include <CLI11.hpp>

#include "aloha_cli/commands.hpp"
#include "aloha_cli/run_config.hpp"

namespace {

struct OptionHelp {
  const char* key;
  const char* help;
};

// Config-file keys double as flag names.
constexpr OptionHelp kOptions[] = {
    {"scheme", "cb or pb"},
    {"n", "node count"},
    {"m", "payload slots per connection (CB)"},
    {"delta", "connection overhead in request slots (CB)"},
    {"k", "packets per connection; with --lp sets M = K*L_P/sigma_N"},
    {"lp", "packet payload length in ms (comma list for casestudy)"},
    {"sigma-n", "request slot length in ms"},
    {"delta-sp", "per-packet overhead of the PB slot in ms"},
    {"lambda", "arrival rate per slot (lambda_N for compare and map)"},
    {"q", "transmission probability (comma list allowed)"},
    {"energy", "battery in mJ"},
    {"e-over-sigma", "battery normalized by the slot, in mW*slots"},
    {"pt", "transmit power in mW"},
    {"pw", "idle and waiting power in mW"},
    {"t0", "lifetime target in slots (comma list allowed)"},
    {"seed", "simulator seed"},
    {"runs", "simulator runs"},
    {"out", "write CSV here"},
    {"wtol", "Lambert W residual tolerance"},
    {"roottol", "relative root-finding tolerance"},
    {"gridstep", "q grid step for sweeps"},
    {"x", "Lambert W argument"},
    {"branch", "Lambert W branch, 0 or -1"},
    {"var", "sweep variable, q or t0"},
    {"from", "sweep start"},
    {"to", "sweep end"},
    {"points", "sweep points"},
    {"k-max", "largest K in the map"},
    {"lp-max", "largest L_P in the map, ms"},
    {"lp-step", "L_P step in the map, ms"},
    {"panel", "map arrival preset, saturated or unsaturated"},
    {"slot-cap", "simulator horizon in slots (0 = automatic)"},
    {"threads", "simulator worker threads (0 = all cores)"},
};

bool color_diagnostics() { return std::getenv("NO_COLOR") == nullptr && isatty(STDERR_FILENO); }

}  // namespace

int main(int argc, char** argv) {
  using namespace aloha::cli;

  CLI::App app{"Energy-aware connection-based vs packet-based slotted Aloha"};
  app.require_subcommand(1, 1);
  app.fallthrough();
  app.set_version_flag("--version", ALOHA_VERSION);

  std::map<std::string, std::string> values;
  std::map<std::string, CLI::Option*> options;
  for (const auto& o : kOptions) {
    options[o.key] = app.add_option(std::string("--") + o.key, values[o.key], o.help);
  }
  bool json = false;
  auto* json_flag = app.add_flag("--json", json, "print a JSON summary to stdout");
  std::string config_path;
  app.add_option("--config", config_path, "flat key = value config file");

  static const std::map<std::string_view, const char*> about = {
      {"lambertw", "evaluate one Lambert W branch"},
      {"eval", "analytic metrics at given q"},
      {"optimize", "maximal lifetime throughput under lifetime targets"},
      {"compare", "PB vs CB optimum for one coupled setting"},
      {"sweep", "curves over a q or T0 grid"},
      {"map", "PB/CB winner over a K x L_P grid"},
      {"simulate", "Monte-Carlo lifetime and delivery"},
      {"validate", "simulation vs analytic model over a q grid"},
      {"casestudy", "small-data threshold on L_N over L_P"}};
  for (auto name : command_names()) app.add_subcommand(std::string(name), about.at(name));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kInvalid;
  }

  const std::string red = color_diagnostics() ? "\033[31m" : "";
  const std::string reset = red.empty() ? "" : "\033[0m";
  try {
    const auto command = parse_command(app.get_subcommands().front()->get_name());
    Settings flags;
    for (const auto& [key, opt] : options) {
      if (opt->count() > 0) flags[key] = values[key];
    }
    if (json_flag->count() > 0) flags["json"] = json ? "true" : "false";
    const Settings file = config_path.empty() ? Settings{} : read_config_file(config_path);
    const RunConfig config = load_config(*command, file, flags);
    return execute(config, std::cout, std::cerr);
  } catch (const std::exception& e) {
    std::cerr << red << "error: " << reset << e.what() << '\n';
    return kInvalid;
  }
}
