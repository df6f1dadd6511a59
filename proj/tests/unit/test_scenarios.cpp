#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>

#include <json.hpp>

#include "fbsim/error.hpp"
#include "fbsim/scenarios.hpp"

using namespace fbsim;
namespace fs = std::filesystem;

namespace {

ErrorCode parse_code(const std::string& text) {
  try {
    parse_config(text);
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::InvalidArgument;
}

std::string read(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path fresh_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("fbsim_unit_" + name);
  fs::remove_all(p);
  return p;
}

const char* kTw = R"({"name": "tw", "kind": "TwConvergence", "eps_list": [1e-2, 1e-3, 1e-4], "b_slopes": [2]})";

}  // namespace

TEST_CASE("kind names and subcommands") {
  CHECK(std::string(subcommand(ScenarioKind::TwConvergence)) == "tw-converge");
  CHECK(std::string(subcommand(ScenarioKind::LimitApprox)) == "limit-approx");
  CHECK(kind_from_subcommand("waiting-time") == ScenarioKind::WaitingTime);
  CHECK(kind_from_string("Conjecture") == ScenarioKind::Conjecture);
  CHECK_FALSE(kind_from_string("Nope").has_value());
}

TEST_CASE("config validation") {
  CHECK(parse_code(R"({"name": "a", "kind": "Asymptotics", "eps_list": []})") == ErrorCode::ConfigError);
  CHECK(parse_code(R"({"name": "a", "kind": "Asymptotics", "eps_list": [1e-3, 1e-2]})") == ErrorCode::ConfigError);
  CHECK(parse_code(R"({"name": "a", "kind": "Asymptotics", "eps_list": [1.5]})") == ErrorCode::ConfigError);
  CHECK(parse_code(R"({"name": "a", "kind": "Asymptotics", "eps_list": [1e-3], "extra": 1})") ==
        ErrorCode::ConfigError);
  CHECK(parse_code(R"({"name": "a", "kind": "Unknown", "eps_list": [1e-3]})") == ErrorCode::ConfigError);
  CHECK(parse_code(R"({"name": "a", "kind": "Asymptotics", "eps_list": [1e-3],)") == ErrorCode::ConfigError);
  CHECK(parse_code(R"({"name": "a", "kind": "Conjecture", "eps_list": [1e-3], "probe_time": 0.55})") ==
        ErrorCode::ConfigError);
  CHECK(parse_code(R"({"name": "a", "kind": "Conjecture", "eps_list": [1e-3], "a_slope": 1, "b_slope": 1})") ==
        ErrorCode::ConfigError);
  CHECK(parse_code(R"({"name": "w", "kind": "WaitingTime", "eps_list": [1e-3], "cases": []})") ==
        ErrorCode::ConfigError);
  CHECK(parse_code(R"({"name": "w", "kind": "WaitingTime",
      "cases": [{"label": "x", "initial": {"kind": "MonotoneTanhLike", "zeros": [0.0001]}, "expect": "immediate"}]})") ==
        ErrorCode::ConfigError);
  CHECK(parse_code(R"({"name": "w", "kind": "WaitingTime",
      "cases": [{"label": "x", "initial": {"kind": "MonotoneTanhLike", "zeros": [0]}, "n": 1.5, "expect": "immediate"}]})") ==
        ErrorCode::ConfigError);
  CHECK(parse_code(R"({"name": "l", "kind": "LimitApprox", "eps_list": [1e-4], "n_sequence": [40, 10]})") ==
        ErrorCode::ConfigError);
  CHECK(parse_code(R"({"name": "i", "kind": "Immobility", "eps_list": [1e-1], "grid": {"a": 1, "b": 0}})") ==
        ErrorCode::ConfigError);
  CHECK(parse_code(R"({"name": "a", "kind": "Asymptotics", "eps_list": [1e-3], "bounds": {"bogus": 1}})") ==
        ErrorCode::ConfigError);

  const auto c = parse_config(kTw);
  CHECK(c.kind == ScenarioKind::TwConvergence);
  CHECK(c.eps_list.size() == 3);
  CHECK(c.bounds.at("final_error_max") == 0.05);
  const auto w = parse_config(R"({"name": "w", "kind": "WaitingTime",
      "cases": [{"label": "f", "initial": {"kind": "FlatExponential", "zeros": [0]}, "n": 1e30, "expect": "infinite"}]})");
  REQUIRE(w.cases.size() == 1);
  CHECK(w.cases[0].n == 1e30);
  CHECK(w.cases[0].expect_infinite);
  CHECK_THROWS_AS(load_config("/nonexistent/config.json"), Error);
}

TEST_CASE("format_number is shortest round trip") {
  CHECK(format_number(0.1) == "0.1");
  CHECK(format_number(2.0) == "2");
  CHECK(std::stod(format_number(1.0 / 3.0)) == 1.0 / 3.0);
  CHECK(format_number(std::numeric_limits<double>::infinity()) == "inf");
  CHECK(format_number(-std::numeric_limits<double>::infinity()) == "-inf");
  CHECK(format_number(std::numeric_limits<double>::quiet_NaN()) == "nan");
}

TEST_CASE("snapshot and scheme metadata formats") {
  const Grid g(0.0, 1.0, 8);
  auto sol = stationary_solution(g, std::vector<double>(g.n_nodes(), 0.5), {0.0, 0.25});
  const std::string csv = snapshot_csv(sol);
  CHECK(csv.rfind("t,x,u\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 1 + 2 * 9);
  const auto meta = nlohmann::json::parse(scheme_meta_json(sol.meta));
  CHECK(meta["problem"] == "stationary");
}

TEST_CASE("asymptotics scenario") {
  const auto r = run_scenario(parse_config(R"({"name": "as", "kind": "Asymptotics", "eps_list": [1e-4, 1e-6, 1e-8]})"));
  CHECK(r.passed());
  const auto s = nlohmann::json::parse(r.summary_json);
  CHECK(s["kind"] == "Asymptotics");
  CHECK(s["runs"].size() == 3);
  CHECK(s["sqrt_rule_flag"]["ratio_at_smallest_eps"].get<double>() < 0.6);
}

TEST_CASE("travelling-wave scenario writes deterministic outputs independent of jobs") {
  const auto cfg = parse_config(kTw);
  const auto r1 = run_scenario(cfg, 1);
  const auto r3 = run_scenario(cfg, 3);
  CHECK(r1.passed());
  const auto s = nlohmann::json::parse(r1.summary_json);
  REQUIRE(s["runs"].size() == 3);
  for (std::size_t i = 0; i + 1 < 3; ++i) {
    CHECK(s["runs"][i + 1]["sup_error"].get<double>() <= s["runs"][i]["sup_error"].get<double>());
  }

  const fs::path d1 = fresh_dir("tw1"), d3 = fresh_dir("tw3");
  write_outputs(r1, d1.string());
  write_outputs(r3, d3.string());
  std::size_t n = 0;
  for (const auto& e : fs::directory_iterator(d1)) {
    CHECK(read(e.path()) == read(d3 / e.path().filename()));
    ++n;
  }
  CHECK(n == r1.files.size() + 2);
  CHECK(read(d1 / "wave_B2_eps0.01.csv").rfind("x,w\n", 0) == 0);

  // One curve per eps plus the closed-form target.
  const std::string gp = read(d1 / "plot.gp");
  std::size_t curves = 0;
  for (std::size_t p = gp.find(" using "); p != std::string::npos; p = gp.find(" using ", p + 1)) ++curves;
  CHECK(curves == 4);
  CHECK(gp.find("target_B2.csv") != std::string::npos);

  fs::remove(d1 / "target_B2.csv");
  CHECK_THROWS_AS(emit_plot_script(r1, d1.string()), Error);
  fs::remove_all(d1);
  fs::remove_all(d3);
}

TEST_CASE("conjecture plot script has a log-x ratio panel") {
  ScenarioResult r{"c", ScenarioKind::Conjecture, {}, "{}", {{"ratio_vs_eps.csv", "eps,ratio\n1e-2,1\n"}}, {}};
  r.panels.push_back({"ratio.png", "ratio", "eps", "ratio", true, false, {{"ratio_vs_eps.csv", "1:2", "r", "lines"}}});
  const fs::path d = fresh_dir("cj");
  write_outputs(r, d.string());
  const std::string gp = read(d / "plot.gp");
  CHECK(gp.find("set logscale x") != std::string::npos);
  CHECK(gp.find("'ratio_vs_eps.csv' using 1:2") != std::string::npos);
  fs::remove_all(d);
}
