#include <doctest.h>

#include <cmath>
#include <sstream>
#include <string>

#include <json.hpp>

#include "aloha_cli/commands.hpp"
#include "aloha_cli/run_config.hpp"

using namespace aloha;
using namespace aloha::cli;

namespace {

std::string error_of(Command cmd, const Settings& file, const Settings& flags) {
  try {
    load_config(cmd, file, flags);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return {};
}

double number(const Cell& c) { return std::get<double>(c); }

std::size_t column(const Table& t, const std::string& name) {
  for (std::size_t i = 0; i < t.columns.size(); ++i) {
    if (t.columns[i] == name) return i;
  }
  FAIL("missing column " << name);
  return 0;
}

}  // namespace

TEST_CASE("config text") {
  const Settings s = parse_config_text("# header\nn = 50\n\nslot_cap=10  # trailing\nq = 0.1,0.2\n");
  CHECK(s.at("n") == "50");
  CHECK(s.at("slot-cap") == "10");
  CHECK(s.at("q") == "0.1,0.2");

  const auto message = [](const char* text) {
    try {
      parse_config_text(text);
    } catch (const ConfigError& e) {
      return std::string(e.what());
    }
    return std::string();
  };
  const std::string unknown = message("n = 5\nfoo = 1\n");
  CHECK(unknown.find("foo") != std::string::npos);
  CHECK(unknown.find("line 2") != std::string::npos);
  CHECK(message("n = 5\nn = 6\n").find("duplicate") != std::string::npos);
  CHECK(message("n 5\n").find("line 1") != std::string::npos);
  CHECK(message("n =\n").find("'n'") != std::string::npos);
  CHECK_THROWS_AS(read_config_file("/nonexistent/aloha.cfg"), ConfigError);
}

TEST_CASE("minimal packet flags") {
  const RunConfig c = load_config(Command::eval, {},
                                  {{"scheme", "pb"}, {"n", "100"}, {"lambda", "0.01"},
                                   {"q", "0.1"}, {"e-over-sigma", "1e5"}, {"pt", "100"},
                                   {"pw", "1"}});
  CHECK(c.scheme == Scheme::pb);
  CHECK(c.n == 100);
  CHECK(c.pb_params(0.1).lambda == 0.01);
  CHECK(c.energy().budget == 1e5);
  CHECK(c.energy().power_ratio() == 100.0);
}

TEST_CASE("flags override the file") {
  const RunConfig c = load_config(Command::eval, {{"n", "10"}, {"pt", "50"}}, {{"n", "20"}});
  CHECK(c.n == 20);
  CHECK(c.pt == 50.0);
}

TEST_CASE("case study defaults") {
  const RunConfig c = load_config(Command::casestudy, {}, {});
  CHECK(c.n == 100);
  CHECK(c.pt == 300.0);
  CHECK(c.pw == 3.0);
  CHECK(c.sigma_n == 2.0);
  CHECK(c.delta_sp == 6.0);
  CHECK(c.delta == 4.0);
}

TEST_CASE("validation errors name the invariant") {
  CHECK(error_of(Command::eval, {}, {{"n", "0"}}).find("n must") != std::string::npos);
  CHECK(error_of(Command::eval, {}, {{"pw", "500"}}).find("waiting power") != std::string::npos);
  CHECK(error_of(Command::eval, {}, {{"q", "1.5"}}).find("q") != std::string::npos);
  CHECK(error_of(Command::eval, {}, {{"n", "ten"}}).find("'n'") != std::string::npos);
  CHECK(error_of(Command::eval, {}, {{"foo", "1"}}).find("foo") != std::string::npos);
  CHECK_FALSE(error_of(Command::eval, {}, {{"energy", "1"}, {"e-over-sigma", "1"}}).empty());
  CHECK_FALSE(error_of(Command::eval, {}, {{"k", "4"}, {"lp", "1"}, {"sigma-n", "2"},
                                           {"m", "3"}}).empty());
}

TEST_CASE("physical units normalize at the boundary") {
  const RunConfig c = load_config(Command::eval, {},
                                  {{"k", "4"}, {"lp", "1"}, {"sigma-n", "2"}, {"energy", "10"}});
  CHECK(c.m == 2.0);
  CHECK(c.budget == doctest::Approx(1000.0 * 10.0 / 2.0));
}

TEST_CASE("infeasible target exits with 2") {
  const RunConfig c = load_config(Command::optimize, {}, {{"t0", "2e5"}});
  const Outcome o = run(c);
  CHECK(o.status == kInfeasible);
  CHECK_FALSE(o.message.empty());
}

TEST_CASE("case study row near 1.57 ms") {
  const Outcome o = run(load_config(Command::casestudy, {}, {{"lp", "0.5"}}));
  REQUIRE(o.status == kOk);
  REQUIRE(o.table.rows.size() == 1);
  CHECK(number(o.table.rows[0][column(o.table, "threshold_L_N")]) ==
        doctest::Approx(1.57).epsilon(2e-3));
}

TEST_CASE("lambertw command") {
  const Outcome o = run(load_config(Command::lambertw, {}, {{"x", "-0.1"}, {"branch", "-1"}}));
  REQUIRE(o.status == kOk);
  CHECK(number(o.table.rows[0][column(o.table, "w")]) ==
        doctest::Approx(-3.5771520639572972).epsilon(1e-14));
}

TEST_CASE("horizon exits with 3") {
  const RunConfig c = load_config(Command::simulate, {},
                                  {{"n", "10"}, {"e-over-sigma", "1000"}, {"runs", "1"},
                                   {"slot-cap", "20"}});
  CHECK(run(c).status == kHorizon);
}

TEST_CASE("csv formatting") {
  Table t{{"a", "b", "c", "d"}, {{1.5, std::int64_t{7}, std::string("x"), true}}};
  CHECK(to_csv(t) == "a,b,c,d\n1.50000000000000000e+00,7,x,true\n");
}

TEST_CASE("reruns are byte-identical") {
  const Settings flags{{"n", "20"}, {"e-over-sigma", "2000"}, {"runs", "3"}, {"q", "0.01,0.05"},
                       {"seed", "42"}};
  for (Command cmd : {Command::simulate, Command::eval, Command::map}) {
    const RunConfig c = load_config(cmd, {}, cmd == Command::map ? Settings{} : flags);
    std::ostringstream a, b, err;
    CHECK(execute(c, a, err) == kOk);
    CHECK(execute(c, b, err) == kOk);
    CHECK_FALSE(a.str().empty());
    CHECK(a.str() == b.str());
  }
}

TEST_CASE("json summary carries a meta block") {
  RunConfig c = load_config(Command::eval, {}, {{"seed", "9"}, {"q", "0.01"}});
  const Outcome o = run(c);
  const nlohmann::json j = nlohmann::json::parse(json_summary(c, o));
  CHECK(j.at("meta").at("command") == "eval");
  CHECK(j.at("meta").at("seed") == 9);
  CHECK(j.at("meta").contains("version"));
  CHECK(j.at("meta").at("config").at("q") == "0.01");
  CHECK(j.at("columns").size() == o.table.columns.size());
  CHECK(j.at("rows").size() == 1);
}

TEST_CASE("command names round-trip") {
  for (std::string_view name : command_names()) {
    const auto cmd = parse_command(name);
    REQUIRE(cmd.has_value());
    CHECK(to_string(*cmd) == name);
  }
  CHECK_FALSE(parse_command("plot").has_value());
}
