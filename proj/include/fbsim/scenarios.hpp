#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fbsim/pde_solver.hpp"

namespace fbsim {

enum class ScenarioKind { TwConvergence, WaveSpeed, Immobility, Conjecture, WaitingTime, LimitApprox, Asymptotics };

const char* to_string(ScenarioKind k) noexcept;
/// CLI subcommand name, e.g. "tw-converge".
const char* subcommand(ScenarioKind k) noexcept;
std::optional<ScenarioKind> kind_from_string(std::string_view s) noexcept;
std::optional<ScenarioKind> kind_from_subcommand(std::string_view s) noexcept;

struct GridSpec {
  double a = -1.0;
  double b = 1.0;
  int n_cells = 1000;
};

struct TimeSpec {
  double T = 1.0;
  double dt = 1e-4;
  double dt_out = 0.02;
};

struct WaitingCase {
  std::string label;
  InitialData initial;
  double n = 160.0;
  bool expect_infinite = false;
};

/// One scenario. Fields not used by a kind keep their defaults; `bounds`
/// holds the pass/fail tolerances after defaults are merged in.
struct ScenarioConfig {
  std::string name;
  ScenarioKind kind = ScenarioKind::Asymptotics;
  std::vector<double> eps_list;

  GridSpec grid;
  TimeSpec time;
  InitialData initial;

  double a_slope = 2.0;
  double b_slope = 1.0;
  std::vector<double> b_slopes;
  double x_max = 6.0;
  double step_tol = 1e-9;
  double height_cap_factor = 10.0;
  double subinterval_fraction = 0.9;

  double fit_t0 = 0.2;
  double fit_t1 = 1.0;
  double probe_time = 0.5;
  std::string delta_rule = "log";

  std::vector<WaitingCase> cases;
  double threshold = 0.05;
  double ab_t0 = 0.2;

  GridSpec bump{0.0, 1.0, 1000};
  std::vector<double> n_sequence{10, 40, 160};
  double alpha = -0.5;
  double steady_b_slope = 1.0;
  double steady_length = 3.0;
  int steady_n_cells = 3000;
  double steady_T = 0.05;
  double steady_dt = 1e-4;
  double cross_n = 1e6;

  std::map<std::string, double> bounds;
};

/// Parses and validates a JSON document; throws Error(ConfigError) naming the field.
ScenarioConfig parse_config(std::string_view json_text);
ScenarioConfig load_config(const std::string& path);

struct Check {
  std::string name;
  double value;
  double bound;
  bool passed;
};

struct OutputFile {
  std::string name;
  std::string content;
};

struct Curve {
  std::string csv;
  std::string columns;  // gnuplot `using` spec, e.g. "1:2"
  std::string title;
  std::string style = "lines";
};

struct Panel {
  std::string output;  // image name
  std::string title;
  std::string xlabel;
  std::string ylabel;
  bool log_x = false;
  bool log_y = false;
  std::vector<Curve> curves;
};

struct ScenarioResult {
  std::string name;
  ScenarioKind kind;
  std::vector<Check> checks;
  std::string summary_json;
  std::vector<OutputFile> files;  // CSVs in a fixed order
  std::vector<Panel> panels;

  bool passed() const;
};

/// Runs every entry (up to `jobs` at a time) and assembles the outputs in memory.
ScenarioResult run_scenario(const ScenarioConfig& config, int jobs = 1);

/// Writes summary.json, the CSVs and plot.gp into `dir` (created if missing).
void write_outputs(const ScenarioResult& result, const std::string& dir);

/// Writes `dir`/plot.gp for the result's panels; IoError if a referenced CSV is not in `dir`.
void emit_plot_script(const ScenarioResult& result, const std::string& dir);

/// Shortest round-trip decimal form; "nan", "inf", "-inf" for non-finite values.
std::string format_number(double v);

/// `t,x,u` rows for every stored time.
std::string snapshot_csv(const PdeSolution& sol);
/// Scheme metadata as a JSON object.
std::string scheme_meta_json(const SchemeMeta& meta);

}  // namespace fbsim
