#include <cstdio>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fbsim/fbsim.h"

namespace {

struct Args {
  std::string config;
  std::string out;
  int jobs = 1;
};

int fail(fbsim_status st) {
  std::fprintf(stderr, "error [%s]: %s\n", fbsim_status_string(st), fbsim_last_error());
  return 2;
}

int run(const std::string& subcommand, const Args& args) {
  fbsim_scenario* scenario = nullptr;
  fbsim_status st = fbsim_scenario_load(args.config.c_str(), &scenario);
  if (st != FBSIM_OK) return fail(st);
  if (subcommand != fbsim_scenario_subcommand(scenario)) {
    std::fprintf(stderr, "error [ConfigError]: config kind '%s' belongs to subcommand '%s', not '%s'\n",
                 fbsim_scenario_kind(scenario), fbsim_scenario_subcommand(scenario), subcommand.c_str());
    fbsim_scenario_free(scenario);
    return 2;
  }
  fbsim_result* result = nullptr;
  st = fbsim_scenario_run(scenario, args.jobs, &result);
  fbsim_scenario_free(scenario);
  if (st != FBSIM_OK) return fail(st);
  st = fbsim_result_write(result, args.out.c_str());
  if (st != FBSIM_OK) {
    fbsim_result_free(result);
    return fail(st);
  }
  const std::size_t n = fbsim_result_check_count(result);
  for (std::size_t i = 0; i < n; ++i) {
    const char* name = nullptr;
    double value = 0.0, bound = 0.0;
    int passed = 0;
    fbsim_result_check(result, i, &name, &value, &bound, &passed);
    std::printf("%s  %s: value %.6g, bound %.6g\n", passed ? "PASS" : "FAIL", name, value, bound);
  }
  const int ok = fbsim_result_passed(result);
  fbsim_result_free(result);
  std::printf("%s (outputs in %s)\n", ok ? "all bounds satisfied" : "bound violated", args.out.c_str());
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Regularised binary-fluid interface experiments"};
  app.require_subcommand(1);
  const std::vector<std::pair<std::string, std::string>> commands{
      {"tw-converge", "Travelling-wave shooting vs closed-form steady states"},
      {"wave-speed", "Interface speed of the travelling-wave fixture"},
      {"immobility", "Interface displacement for fixed data as eps shrinks"},
      {"conjecture", "Weighted interface velocity vs the slope-jump law"},
      {"waiting-time", "One-sided slopes of the limit problem at an interface"},
      {"limit-approx", "Approximation of the limit problem by lifted solutions"},
      {"asymptotics", "Asymptotics of the log transform"},
  };
  std::vector<Args> args(commands.size());
  for (std::size_t i = 0; i < commands.size(); ++i) {
    auto* sub = app.add_subcommand(commands[i].first, commands[i].second);
    sub->add_option("--config", args[i].config, "Scenario config (JSON)")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", args[i].out, "Output directory")->required();
    sub->add_option("--jobs", args[i].jobs, "Worker threads")->check(CLI::PositiveNumber);
  }
  CLI11_PARSE(app, argc, argv);
  for (std::size_t i = 0; i < commands.size(); ++i) {
    if (app.got_subcommand(commands[i].first)) return run(commands[i].first, args[i]);
  }
  return 2;
}
