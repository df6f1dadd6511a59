#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "fbsim/error.hpp"
#include "fbsim/scenarios.hpp"

namespace fbsim {
namespace {

using nlohmann::json;

struct KindInfo {
  ScenarioKind kind;
  const char* name;
  const char* command;
};

constexpr KindInfo kKinds[] = {
    {ScenarioKind::TwConvergence, "TwConvergence", "tw-converge"},
    {ScenarioKind::WaveSpeed, "WaveSpeed", "wave-speed"},
    {ScenarioKind::Immobility, "Immobility", "immobility"},
    {ScenarioKind::Conjecture, "Conjecture", "conjecture"},
    {ScenarioKind::WaitingTime, "WaitingTime", "waiting-time"},
    {ScenarioKind::LimitApprox, "LimitApprox", "limit-approx"},
    {ScenarioKind::Asymptotics, "Asymptotics", "asymptotics"},
};

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw Error(ErrorCode::ConfigError, where + ": " + what);
}

// Reads the members of one JSON object and rejects any member left unread.
class Fields {
 public:
  Fields(const json& obj, std::string path) : obj_(obj), path_(std::move(path)) {
    if (!obj_.is_object()) fail(path_, "expected an object");
  }

  bool has(const std::string& key) const { return obj_.contains(key); }

  const json& raw(const std::string& key) {
    seen_.insert(key);
    return obj_.at(key);
  }

  double number(const std::string& key, double fallback) {
    if (!has(key)) return fallback;
    const json& v = raw(key);
    if (!v.is_number()) fail(where(key), "expected a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) fail(where(key), "expected a finite number");
    return d;
  }

  int integer(const std::string& key, int fallback) {
    if (!has(key)) return fallback;
    const json& v = raw(key);
    if (!v.is_number_integer()) fail(where(key), "expected an integer");
    return v.get<int>();
  }

  std::string string(const std::string& key, const std::string& fallback, bool required = false) {
    if (!has(key)) {
      if (required) fail(where(key), "is required");
      return fallback;
    }
    const json& v = raw(key);
    if (!v.is_string()) fail(where(key), "expected a string");
    return v.get<std::string>();
  }

  bool boolean(const std::string& key, bool fallback) {
    if (!has(key)) return fallback;
    const json& v = raw(key);
    if (!v.is_boolean()) fail(where(key), "expected true or false");
    return v.get<bool>();
  }

  std::vector<double> numbers(const std::string& key, const std::vector<double>& fallback) {
    if (!has(key)) return fallback;
    const json& v = raw(key);
    if (!v.is_array()) fail(where(key), "expected an array of numbers");
    std::vector<double> out;
    for (const auto& e : v) {
      if (!e.is_number()) fail(where(key), "expected an array of numbers");
      out.push_back(e.get<double>());
    }
    return out;
  }

  Fields object(const std::string& key) {
    return Fields(raw(key), where(key));
  }

  std::string where(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  void finish() const {
    for (auto it = obj_.begin(); it != obj_.end(); ++it) {
      if (!seen_.count(it.key())) fail(where(it.key()), "unknown field");
    }
  }

 private:
  const json& obj_;
  std::string path_;
  std::set<std::string> seen_;
};

GridSpec read_grid(Fields& parent, const std::string& key, GridSpec g) {
  if (!parent.has(key)) return g;
  Fields f = parent.object(key);
  g.a = f.number("a", g.a);
  g.b = f.number("b", g.b);
  g.n_cells = f.integer("n_cells", g.n_cells);
  f.finish();
  if (!(g.a < g.b)) fail(parent.where(key), "needs a < b");
  if (g.n_cells < 8) fail(parent.where(key), "needs n_cells >= 8");
  return g;
}

TimeSpec read_time(Fields& parent, TimeSpec t) {
  if (!parent.has("time")) return t;
  Fields f = parent.object("time");
  t.T = f.number("T", t.T);
  t.dt = f.number("dt", t.dt);
  t.dt_out = f.number("dt_out", t.dt_out);
  f.finish();
  if (!(t.T > 0.0 && t.dt > 0.0 && t.dt_out > 0.0)) fail("time", "T, dt and dt_out must be positive");
  if (t.dt > t.dt_out) fail("time", "dt must not exceed dt_out");
  return t;
}

InitialData read_initial(Fields& parent, const std::string& key, InitialData d) {
  if (!parent.has(key)) return d;
  Fields f = parent.object(key);
  const std::string kind = f.string("kind", to_string(d.kind));
  if (kind == "MonotoneTanhLike") {
    d.kind = InitialKind::MonotoneTanhLike;
  } else if (kind == "MultiZero") {
    d.kind = InitialKind::MultiZero;
  } else if (kind == "FlatExponential") {
    d.kind = InitialKind::FlatExponential;
  } else {
    fail(f.where("kind"), "unknown initial kind '" + kind + "'");
  }
  d.zeros = f.numbers("zeros", d.zeros);
  d.steepness = f.number("steepness", d.steepness);
  d.skew = f.number("skew", d.skew);
  d.skew_width = f.number("skew_width", d.skew_width);
  f.finish();
  return d;
}

void check_profile(const InitialData& d, const GridSpec& g, const std::string& where, bool zeros_on_nodes) {
  try {
    const Grid grid(g.a, g.b, g.n_cells);
    make_profile(d, grid, 1.0);
    if (zeros_on_nodes) {
      for (double z : d.zeros) {
        if (grid.node_index(z) < 0) fail(where, "zero " + format_number(z) + " is not a grid node");
      }
    }
  } catch (const Error& e) {
    if (e.code() == ErrorCode::ConfigError) throw;
    fail(where, e.what());
  }
}

void check_integer_n(double n, const std::string& where) {
  if (!(n >= 1.0) || std::floor(n) != n) fail(where, "n must be a positive integer");
}

std::map<std::string, double> default_bounds(ScenarioKind k) {
  switch (k) {
    case ScenarioKind::TwConvergence:
      return {{"monotone_slack", 0.10}, {"final_error_max", 0.05}, {"phase_factor", 5.0}};
    case ScenarioKind::WaveSpeed:
      return {{"rel_band", 0.20}};
    case ScenarioKind::Immobility:
      return {{"monotone_slack", 0.10}, {"scaling_band", 3.0}};
    case ScenarioKind::Conjecture:
      return {{"ratio_min", 0.7}, {"ratio_max", 1.3}, {"flux_rel", 0.10}};
    case ScenarioKind::WaitingTime:
      return {{"ab_factor", 0.02}, {"tq_slack", 0.10}};
    case ScenarioKind::LimitApprox:
      return {{"n_slack", 5e-3},  {"energy_factor", 2.0}, {"weak_max", 1e-3},
              {"weak_refine_factor", 2.0}, {"cross_max", 0.05}, {"cross_band", 0.05}};
    case ScenarioKind::Asymptotics:
      return {{"ratio_min", 0.85}, {"ratio_max", 1.0}, {"identity_rel", 1e-12}};
  }
  return {};
}

bool is_output_time(double t, const TimeSpec& ts) {
  const double k = t / ts.dt_out;
  return std::fabs(k - std::round(k)) < 1e-9 && t > 0.0 && t < ts.T;
}

}  // namespace

const char* to_string(ScenarioKind k) noexcept {
  for (const auto& info : kKinds) {
    if (info.kind == k) return info.name;
  }
  return "unknown";
}

const char* subcommand(ScenarioKind k) noexcept {
  for (const auto& info : kKinds) {
    if (info.kind == k) return info.command;
  }
  return "unknown";
}

std::optional<ScenarioKind> kind_from_string(std::string_view s) noexcept {
  for (const auto& info : kKinds) {
    if (s == info.name) return info.kind;
  }
  return std::nullopt;
}

std::optional<ScenarioKind> kind_from_subcommand(std::string_view s) noexcept {
  for (const auto& info : kKinds) {
    if (s == info.command) return info.kind;
  }
  return std::nullopt;
}

ScenarioConfig parse_config(std::string_view json_text) {
  json doc;
  try {
    doc = json::parse(json_text.begin(), json_text.end());
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::ConfigError, std::string("invalid JSON: ") + e.what());
  }
  Fields f(doc, "");
  ScenarioConfig c;
  c.name = f.string("name", "", true);
  if (c.name.empty()) fail("name", "must not be empty");
  const std::string kind = f.string("kind", "", true);
  const auto k = kind_from_string(kind);
  if (!k) fail("kind", "unknown scenario kind '" + kind + "'");
  c.kind = *k;

  c.eps_list = f.numbers("eps_list", {});
  if (c.kind == ScenarioKind::WaitingTime) {
    if (!c.eps_list.empty()) fail("eps_list", "WaitingTime runs the limit problem only; remove eps_list");
  } else {
    if (c.eps_list.empty()) fail("eps_list", "must not be empty");
    for (std::size_t i = 0; i < c.eps_list.size(); ++i) {
      if (!(c.eps_list[i] > 0.0 && c.eps_list[i] < 1.0)) fail("eps_list", "entries must lie in (0, 1)");
      if (i > 0 && !(c.eps_list[i] < c.eps_list[i - 1])) fail("eps_list", "must be strictly decreasing");
    }
  }

  c.bounds = default_bounds(c.kind);
  if (f.has("bounds")) {
    Fields b = f.object("bounds");
    for (auto& [key, value] : c.bounds) value = b.number(key, value);
    b.finish();
  }

  switch (c.kind) {
    case ScenarioKind::TwConvergence: {
      c.b_slopes = f.numbers("b_slopes", {});
      if (c.b_slopes.empty()) fail("b_slopes", "must not be empty");
      for (double b : c.b_slopes) {
        if (!(b > 0.0)) fail("b_slopes", "entries must be positive");
      }
      c.x_max = f.number("x_max", c.x_max);
      c.step_tol = f.number("step_tol", c.step_tol);
      c.height_cap_factor = f.number("height_cap_factor", c.height_cap_factor);
      c.subinterval_fraction = f.number("subinterval_fraction", c.subinterval_fraction);
      if (!(c.x_max > 0.0 && c.step_tol > 0.0)) fail("x_max/step_tol", "must be positive");
      if (!(c.height_cap_factor > 1.0)) fail("height_cap_factor", "must exceed 1");
      if (!(c.subinterval_fraction > 0.0 && c.subinterval_fraction <= 1.0)) {
        fail("subinterval_fraction", "must lie in (0, 1]");
      }
      break;
    }
    case ScenarioKind::WaveSpeed:
    case ScenarioKind::Conjecture: {
      c.a_slope = f.number("a_slope", c.a_slope);
      c.b_slope = f.number("b_slope", c.b_slope);
      if (!(c.a_slope > 0.0 && c.b_slope > 0.0)) fail("a_slope/b_slope", "must be positive");
      c.grid = read_grid(f, "grid", {-4.0, 4.0, 4000});
      c.time = read_time(f, {1.0, 1e-4, c.kind == ScenarioKind::WaveSpeed ? 0.01 : 0.1});
      c.height_cap_factor = f.number("height_cap_factor", 100.0);
      if (!(c.height_cap_factor > 1.0)) fail("height_cap_factor", "must exceed 1");
      if (!(c.grid.a < 0.0 && c.grid.b > 0.0)) fail("grid", "must contain the wave origin 0");
      if (c.kind == ScenarioKind::WaveSpeed) {
        const auto win = f.numbers("fit_window", {0.2, 1.0});
        if (win.size() != 2 || !(win[0] >= 0.0 && win[0] < win[1] && win[1] <= c.time.T)) {
          fail("fit_window", "needs [t0, t1] with 0 <= t0 < t1 <= T");
        }
        c.fit_t0 = win[0];
        c.fit_t1 = win[1];
      } else {
        if (c.a_slope == c.b_slope) fail("a_slope/b_slope", "the conjecture needs a slope jump (a_slope != b_slope)");
        c.probe_time = f.number("probe_time", c.probe_time);
        if (!is_output_time(c.probe_time, c.time)) {
          fail("probe_time", "must be an interior multiple of time.dt_out");
        }
        c.delta_rule = f.string("delta_rule", c.delta_rule);
        if (c.delta_rule != "log" && c.delta_rule != "sqrt") fail("delta_rule", "must be 'log' or 'sqrt'");
      }
      break;
    }
    case ScenarioKind::Immobility: {
      c.grid = read_grid(f, "grid", c.grid);
      c.time = read_time(f, c.time);
      c.initial = read_initial(f, "initial", {InitialKind::MonotoneTanhLike, {0.0}, 3.0, 0.5, 0.1});
      if (c.initial.kind != InitialKind::MonotoneTanhLike) fail("initial.kind", "Immobility needs MonotoneTanhLike");
      check_profile(c.initial, c.grid, "initial", false);
      break;
    }
    case ScenarioKind::WaitingTime: {
      c.grid = read_grid(f, "grid", c.grid);
      c.time = read_time(f, {2.0, 1e-4, 0.02});
      c.threshold = f.number("threshold", c.threshold);
      c.ab_t0 = f.number("ab_t0", c.ab_t0);
      if (!(c.threshold > 0.0)) fail("threshold", "must be positive");
      if (!(c.ab_t0 > 0.0 && c.ab_t0 < c.time.T)) fail("ab_t0", "must lie in (0, T)");
      if (!f.has("cases")) fail("cases", "is required");
      const json& arr = f.raw("cases");
      if (!arr.is_array() || arr.empty()) fail("cases", "expected a non-empty array");
      for (std::size_t i = 0; i < arr.size(); ++i) {
        const std::string where = "cases[" + std::to_string(i) + "]";
        Fields cf(arr[i], where);
        WaitingCase wc;
        wc.label = cf.string("label", "", true);
        if (!cf.has("initial")) fail(where + ".initial", "is required");
        wc.initial = read_initial(cf, "initial", {});
        wc.n = cf.number("n", wc.n);
        check_integer_n(wc.n, where + ".n");
        const std::string expect = cf.string("expect", "", true);
        if (expect == "infinite") {
          wc.expect_infinite = true;
        } else if (expect != "immediate") {
          fail(where + ".expect", "must be 'infinite' or 'immediate'");
        }
        cf.finish();
        if (wc.initial.zeros.size() != 1) fail(where + ".initial.zeros", "needs exactly one zero");
        check_profile(wc.initial, c.grid, where + ".initial", true);
        c.cases.push_back(wc);
      }
      break;
    }
    case ScenarioKind::LimitApprox: {
      c.time = read_time(f, {0.5, 1e-4, 0.01});
      c.bump = read_grid(f, "bump", c.bump);
      c.n_sequence = f.numbers("n_sequence", c.n_sequence);
      if (c.n_sequence.size() < 2) fail("n_sequence", "needs at least two entries");
      for (std::size_t i = 0; i < c.n_sequence.size(); ++i) {
        check_integer_n(c.n_sequence[i], "n_sequence");
        if (i > 0 && !(c.n_sequence[i] > c.n_sequence[i - 1])) fail("n_sequence", "must be increasing");
      }
      c.alpha = f.number("alpha", c.alpha);
      if (!(c.alpha > -1.0)) fail("alpha", "must exceed -1");
      if (f.has("steady")) {
        Fields s = f.object("steady");
        c.steady_b_slope = s.number("b_slope", c.steady_b_slope);
        c.steady_length = s.number("length", c.steady_length);
        c.steady_n_cells = s.integer("n_cells", c.steady_n_cells);
        c.steady_T = s.number("T", c.steady_T);
        c.steady_dt = s.number("dt", c.steady_dt);
        s.finish();
      }
      if (!(c.steady_b_slope > 0.0 && c.steady_length > 0.0 && c.steady_T > 0.0 && c.steady_dt > 0.0)) {
        fail("steady", "b_slope, length, T and dt must be positive");
      }
      if (c.steady_n_cells < 8) fail("steady.n_cells", "must be >= 8");
      if (c.steady_b_slope < 1.0 && c.steady_length > std::log((1 + c.steady_b_slope) / (1 - c.steady_b_slope))) {
        fail("steady.length", "exceeds the support of the steady state");
      }
      c.grid = read_grid(f, "grid", c.grid);
      c.initial = read_initial(f, "initial", {InitialKind::MonotoneTanhLike, {0.0}, 3.0, 0.5, 0.1});
      c.cross_n = f.number("cross_n", c.cross_n);
      check_integer_n(c.cross_n, "cross_n");
      check_profile(c.initial, c.grid, "initial", true);
      break;
    }
    case ScenarioKind::Asymptotics:
      break;
  }
  f.finish();
  return c;
}

ScenarioConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::ConfigError, "cannot read config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

}  // namespace fbsim
