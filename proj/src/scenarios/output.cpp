#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "fbsim/error.hpp"
#include "fbsim/scenarios.hpp"

namespace fbsim {

namespace fs = std::filesystem;

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string snapshot_csv(const PdeSolution& sol) {
  std::string out = "t,x,u\n";
  for (std::size_t k = 0; k < sol.times.size(); ++k) {
    const std::string t = format_number(sol.times[k]);
    for (std::size_t j = 0; j < sol.grid.n_nodes(); ++j) {
      out += t;
      out += ',';
      out += format_number(sol.grid.x(j));
      out += ',';
      out += format_number(sol.profiles[k][j]);
      out += '\n';
    }
  }
  return out;
}

std::string scheme_meta_json(const SchemeMeta& meta) {
  nlohmann::ordered_json j;
  j["problem"] = meta.problem;
  j["dt"] = meta.dt;
  j["theta"] = meta.theta;
  j["steps"] = meta.steps;
  j["tridiagonal_solves"] = meta.tridiagonal_solves;
  if (meta.problem == "eps") j["eps"] = meta.eps;
  if (meta.problem == "limit") j["n"] = meta.n;
  return j.dump();
}

bool ScenarioResult::passed() const {
  for (const auto& c : checks) {
    if (!c.passed) return false;
  }
  return true;
}

namespace {

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot open '" + path.string() + "' for writing");
  out << content;
  if (!out) throw Error(ErrorCode::IoError, "failed writing '" + path.string() + "'");
}

std::string quoted(const std::string& s) {
  std::string out = "'";
  for (char c : s) {
    if (c == '\'') {
      out += "''";
    } else {
      out += c;
    }
  }
  return out + "'";
}

}  // namespace

void emit_plot_script(const ScenarioResult& result, const std::string& dir) {
  std::ostringstream gp;
  gp << "# " << result.name << " (" << to_string(result.kind) << ")\n";
  gp << "set datafile separator ','\n";
  gp << "set key autotitle columnhead\n";
  gp << "set terminal pngcairo size 900,600\n";
  for (const auto& panel : result.panels) {
    gp << "\nset output " << quoted(panel.output) << "\n";
    gp << "set title " << quoted(panel.title) << "\n";
    gp << "set xlabel " << quoted(panel.xlabel) << "\n";
    gp << "set ylabel " << quoted(panel.ylabel) << "\n";
    gp << (panel.log_x ? "set logscale x\n" : "unset logscale x\n");
    gp << (panel.log_y ? "set logscale y\n" : "unset logscale y\n");
    gp << "plot ";
    for (std::size_t i = 0; i < panel.curves.size(); ++i) {
      const auto& c = panel.curves[i];
      if (!fs::exists(fs::path(dir) / c.csv)) {
        throw Error(ErrorCode::IoError, "plot references missing CSV '" + c.csv + "'");
      }
      if (i > 0) gp << ", \\\n     ";
      gp << quoted(c.csv) << " using " << c.columns << " with " << c.style << " title " << quoted(c.title);
    }
    gp << "\n";
  }
  write_file(fs::path(dir) / "plot.gp", gp.str());
}

void write_outputs(const ScenarioResult& result, const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::IoError, "cannot create output directory '" + dir + "': " + ec.message());
  for (const auto& f : result.files) write_file(fs::path(dir) / f.name, f.content);
  write_file(fs::path(dir) / "summary.json", result.summary_json);
  emit_plot_script(result, dir);
}

}  // namespace fbsim
