#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <variant>
#include <vector>

#include "aloha_cli/run_config.hpp"

namespace aloha::cli {

enum ExitCode : int {
  kOk = 0,
  kInvalid = 1,     ///< parse or validation error
  kInfeasible = 2,  ///< lifetime target above the idle lifetime
  kHorizon = 3,     ///< simulator hit its slot cap
};

using Cell = std::variant<double, std::int64_t, std::string, bool>;

/// Fixed-schema result of one subcommand.
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
};

/// Reals in full-precision scientific notation.
std::string to_csv(const Table& t);

struct Outcome {
  Table table;
  int status = kOk;
  std::string message;  ///< diagnostic for a non-zero status
  /// Extra fields for the JSON summary, as (key, value) pairs.
  std::vector<std::pair<std::string, Cell>> summary;
};

/// Runs the subcommand without touching any stream. Throws ConfigError or
/// std::invalid_argument on bad input.
Outcome run(const RunConfig& config);

/// `run` plus emission: CSV to `config.out` (or `out` without --json), the
/// JSON summary to `out` with --json, diagnostics to `err`.
int execute(const RunConfig& config, std::ostream& out, std::ostream& err);

std::string json_summary(const RunConfig& config, const Outcome& outcome);

}  // namespace aloha::cli
