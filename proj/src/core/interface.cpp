#include "fbsim/interface.hpp"

#include <algorithm>
#include <cmath>
#include <initializer_list>
#include <limits>
#include <string>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/roots.hpp>

#include "fbsim/error.hpp"

namespace fbsim {
namespace {

struct LocalCubic {
  double xs[4];
  double ys[4];

  double operator()(double x) const {
    double s = 0.0;
    for (int i = 0; i < 4; ++i) {
      double l = 1.0;
      for (int k = 0; k < 4; ++k) {
        if (k != i) l *= (x - xs[k]) / (xs[i] - xs[k]);
      }
      s += ys[i] * l;
    }
    return s;
  }

  double derivative(double x) const {
    double s = 0.0;
    for (int i = 0; i < 4; ++i) {
      double dl = 0.0;
      for (int m = 0; m < 4; ++m) {
        if (m == i) continue;
        double term = 1.0 / (xs[i] - xs[m]);
        for (int k = 0; k < 4; ++k) {
          if (k != i && k != m) term *= (x - xs[k]) / (xs[i] - xs[k]);
        }
        dl += term;
      }
      s += ys[i] * dl;
    }
    return s;
  }
};

// Maximal run of strictly increasing nodes [lo, hi] around the unique sign change.
struct Core {
  std::size_t lo;
  std::size_t hi;
};

Core monotone_core(std::span<const double> u, double t) {
  if (u.size() < 4) throw Error(ErrorCode::GridTooSmall, "need at least 4 nodes");
  std::size_t changes = 0, cell = 0;
  for (std::size_t j = 0; j + 1 < u.size(); ++j) {
    if ((u[j] > 0.0) != (u[j + 1] > 0.0)) {
      ++changes;
      cell = j;
    }
  }
  const std::string at = " at t = " + std::to_string(t);
  if (changes == 0) throw Error(ErrorCode::NoSignChange, "profile has no zero" + at);
  if (changes > 1 || u[cell] > 0.0) {
    throw Error(ErrorCode::NotMonotone, "profile does not cross zero exactly once upwards" + at);
  }
  Core c{cell, cell + 1};
  while (c.lo > 0 && u[c.lo - 1] < u[c.lo]) --c.lo;
  while (c.hi + 1 < u.size() && u[c.hi + 1] > u[c.hi]) ++c.hi;
  return c;
}

// Cell j in the core with u[j] <= level <= u[j+1].
std::size_t bracket(std::span<const double> u, const Core& c, double level) {
  if (!(level >= u[c.lo] && level <= u[c.hi])) {
    throw Error(ErrorCode::OutOfRange,
                "level " + std::to_string(level) + " outside the increasing range around the interface");
  }
  const auto first = u.begin() + static_cast<std::ptrdiff_t>(c.lo);
  const auto last = u.begin() + static_cast<std::ptrdiff_t>(c.hi) + 1;
  const auto it = std::upper_bound(first, last, level);
  std::size_t j = it == first ? c.lo : static_cast<std::size_t>(it - u.begin()) - 1;
  return std::min(j, c.hi - 1);
}

LocalCubic cubic_around(const Grid& grid, std::span<const double> u, std::size_t j) {
  const std::size_t last = u.size() - 1;
  std::size_t start = j == 0 ? 0 : j - 1;
  if (start + 3 > last) start = last - 3;
  LocalCubic c{};
  for (int i = 0; i < 4; ++i) {
    c.xs[i] = grid.x(start + i);
    c.ys[i] = u[start + i];
  }
  return c;
}

double root_in_cell(const Grid& grid, std::span<const double> u, std::size_t j, double level) {
  if (u[j] == level) return grid.x(j);
  if (u[j + 1] == level) return grid.x(j + 1);
  const LocalCubic c = cubic_around(grid, u, j);
  auto f = [&](double x) { return c(x) - level; };
  double lo = grid.x(j), hi = grid.x(j + 1);
  double flo = u[j] - level, fhi = u[j + 1] - level;
  boost::uintmax_t iters = 100;
  const auto r = boost::math::tools::toms748_solve(f, lo, hi, flo, fhi,
                                                   boost::math::tools::eps_tolerance<double>(52), iters);
  return 0.5 * (r.first + r.second);
}

std::size_t exact_time_index(const PdeSolution& sol, double t) {
  const std::size_t k = sol.time_index(t);
  if (std::fabs(sol.times[k] - t) > 1e-12 * std::max(1.0, std::fabs(t))) {
    throw Error(ErrorCode::OutOfRange, "t = " + std::to_string(t) + " is not a stored time");
  }
  return k;
}

// Breakpoints for integrals over [-delta, delta]: 0 and every nodal value of
// the given profiles, where the piecewise cubic inverse changes stencil.
// Nodal values plus a geometric ladder on the eps scale, where the weight
// 1/(eps + Phi^2) peaks; each piece is then smooth enough for a shallow rule.
std::vector<double> breakpoints(double delta, double eps,
                                std::initializer_list<std::span<const double>> profiles) {
  std::vector<double> b{-delta, 0.0, delta};
  for (double s = eps; s < delta; s *= 4.0) {
    b.push_back(s);
    b.push_back(-s);
  }
  for (const auto& u : profiles) {
    for (double v : u) {
      if (v > -delta && v < delta) b.push_back(v);
    }
  }
  std::sort(b.begin(), b.end());
  b.erase(std::unique(b.begin(), b.end()), b.end());
  return b;
}

template <class F>
double integrate(F&& f, const std::vector<double>& breaks) {
  using boost::math::quadrature::gauss_kronrod;
  double s = 0.0;
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    s += gauss_kronrod<double, 15>::integrate(f, breaks[i], breaks[i + 1], 8, 1e-10);
  }
  return s;
}

double x_derivative(const Grid& grid, std::span<const double> u, const Core& core, double level) {
  const std::size_t j = bracket(u, core, level);
  const LocalCubic c = cubic_around(grid, u, j);
  return 1.0 / c.derivative(root_in_cell(grid, u, j, level));
}

std::size_t zero_node(const Grid& grid, double x1) {
  const long j = grid.node_index(x1);
  if (j < 0) throw Error(ErrorCode::InvalidArgument, "x1 = " + std::to_string(x1) + " is not a grid node");
  return static_cast<std::size_t>(j);
}

// Intercept of the least-squares line through (d_i, q_i).
double intercept(const double d[3], const double q[3]) {
  const double md = (d[0] + d[1] + d[2]) / 3.0;
  const double mq = (q[0] + q[1] + q[2]) / 3.0;
  double sxy = 0.0, sxx = 0.0;
  for (int i = 0; i < 3; ++i) {
    sxy += (d[i] - md) * (q[i] - mq);
    sxx += (d[i] - md) * (d[i] - md);
  }
  return mq - sxy / sxx * md;
}

double side_slope(const Grid& grid, std::span<const double> u, std::size_t j1, Side side) {
  const std::size_t last = u.size() - 1;
  double d[3], q[3];
  for (int i = 0; i < 3; ++i) {
    const std::size_t off = static_cast<std::size_t>(i) + 1;
    std::size_t j;
    if (side == Side::Right) {
      if (j1 + off >= last) throw Error(ErrorCode::TooCoarse, "fewer than 3 interior nodes right of x1");
      j = j1 + off;
    } else {
      if (j1 < off + 1) throw Error(ErrorCode::TooCoarse, "fewer than 3 interior nodes left of x1");
      j = j1 - off;
    }
    d[i] = grid.x(j) - grid.x(j1);
    q[i] = u[j] / d[i];
  }
  return intercept(d, q);
}

}  // namespace

double crossing(const Grid& grid, std::span<const double> u, double level) {
  return root_in_cell(grid, u, bracket(u, monotone_core(u, 0.0), level), level);
}

InterfaceTrace track(const PdeSolution& sol) {
  InterfaceTrace tr;
  tr.times = sol.times;
  for (std::size_t k = 0; k < sol.times.size(); ++k) {
    const auto& u = sol.profiles[k];
    const Core core = monotone_core(u, sol.times[k]);
    tr.zeta.push_back(root_in_cell(sol.grid, u, bracket(u, core, 0.0), 0.0));
  }
  const std::size_t m = tr.times.size();
  tr.zeta_rate.assign(m, 0.0);
  if (m >= 2) {
    tr.zeta_rate[0] = (tr.zeta[1] - tr.zeta[0]) / (tr.times[1] - tr.times[0]);
    tr.zeta_rate[m - 1] = (tr.zeta[m - 1] - tr.zeta[m - 2]) / (tr.times[m - 1] - tr.times[m - 2]);
    for (std::size_t k = 1; k + 1 < m; ++k) {
      tr.zeta_rate[k] = (tr.zeta[k + 1] - tr.zeta[k - 1]) / (tr.times[k + 1] - tr.times[k - 1]);
    }
  }
  return tr;
}

std::vector<double> x_of_u(const PdeSolution& sol, double t, std::span<const double> u_values) {
  const auto& u = sol.profiles[exact_time_index(sol, t)];
  const Core core = monotone_core(u, t);
  std::vector<double> out;
  out.reserve(u_values.size());
  for (double v : u_values) out.push_back(root_in_cell(sol.grid, u, bracket(u, core, v), v));
  return out;
}

double slope_at_level(const PdeSolution& sol, double t, double level) {
  const auto& u = sol.profiles[exact_time_index(sol, t)];
  return 1.0 / x_derivative(sol.grid, u, monotone_core(u, t), level);
}

double weighted_velocity(const PdeSolution& sol, double t, double delta, const EpsModel& model) {
  if (!(delta > 0.0)) throw Error(ErrorCode::InvalidArgument, "delta must be positive");
  const std::size_t k = exact_time_index(sol, t);
  if (k == 0 || k + 1 >= sol.times.size()) {
    throw Error(ErrorCode::TimeBoundary, "t = " + std::to_string(t) + " has no neighbours for differencing");
  }
  const auto& before = sol.profiles[k - 1];
  const auto& after = sol.profiles[k + 1];
  const Core core_before = monotone_core(before, sol.times[k - 1]);
  const Core core_after = monotone_core(after, sol.times[k + 1]);
  const double span_t = sol.times[k + 1] - sol.times[k - 1];
  auto weight = [&](double v) { return 1.0 / model.diffusivity(v); };
  auto weighted_rate = [&](double v) {
    const double x_after = root_in_cell(sol.grid, after, bracket(after, core_after, v), v);
    const double x_before = root_in_cell(sol.grid, before, bracket(before, core_before, v), v);
    const double xt = (x_after - x_before) / span_t;
    return xt * weight(v);
  };
  const auto breaks = breakpoints(delta, model.eps(), {before, after});
  const double norm = integrate(weight, breaks);
  const double expected = 2.0 * model.a_transform(delta);
  if (std::fabs(norm - expected) > 1e-8 * std::max(1.0, expected)) {
    throw Error(ErrorCode::SchemeError, "weight normalisation " + std::to_string(norm) + " differs from " +
                                            std::to_string(expected));
  }
  const double num = integrate(weighted_rate, breaks);
  return num / expected;
}

double flux_velocity(const PdeSolution& sol, double t, double delta, const EpsModel& model) {
  if (!(delta > 0.0)) throw Error(ErrorCode::InvalidArgument, "delta must be positive");
  const auto& u = sol.profiles[exact_time_index(sol, t)];
  const Core core = monotone_core(u, t);
  const double e = model.eps();
  auto integrand = [&](double v) {
    const double phi = model.phi_from_u(v);
    return phi * (1.0 - phi * phi) / std::sqrt(e + phi * phi) * x_derivative(sol.grid, u, core, v);
  };
  const double b = integrate(integrand, breakpoints(delta, model.eps(), {u}));
  const double jump = 1.0 / x_derivative(sol.grid, u, core, delta) - 1.0 / x_derivative(sol.grid, u, core, -delta);
  return -(b + jump) / (2.0 * model.a_transform(delta));
}

SlopePair one_sided_slopes(const PdeSolution& sol, double t, double x1) {
  const std::size_t k = sol.time_index(t);
  const std::size_t j1 = zero_node(sol.grid, x1);
  const auto& u = sol.profiles[k];
  return {sol.times[k], side_slope(sol.grid, u, j1, Side::Left), side_slope(sol.grid, u, j1, Side::Right)};
}

std::vector<std::pair<double, double>> slope_history(const PdeSolution& sol, double x1, Side side) {
  const std::size_t j1 = zero_node(sol.grid, x1);
  std::vector<std::pair<double, double>> out;
  for (std::size_t k = 0; k < sol.times.size(); ++k) {
    if (sol.times[k] <= 0.0) continue;
    out.emplace_back(sol.times[k], side_slope(sol.grid, sol.profiles[k], j1, side));
  }
  return out;
}

double waiting_time(const PdeSolution& sol, double x1, Side side, double threshold) {
  if (!(threshold > 0.0)) throw Error(ErrorCode::InvalidArgument, "threshold must be positive");
  const auto hist = slope_history(sol, x1, side);
  for (std::size_t i = 0; i < hist.size(); ++i) {
    if (hist[i].second <= threshold) continue;
    const double t0 = hist[i].first;
    const double floor = 0.9 * t0 * hist[i].second;
    for (std::size_t m = i + 1; m < hist.size(); ++m) {
      if (hist[m].first * hist[m].second < floor) {
        throw Error(ErrorCode::SchemeError, "t * slope dropped below 90% of its value at t = " +
                                                std::to_string(t0) + " (at t = " + std::to_string(hist[m].first) +
                                                ")");
      }
    }
    return t0;
  }
  return std::numeric_limits<double>::infinity();
}

ConjectureGap conjecture_gap(const PdeSolution& sol, const PdeSolution& limit_sol, double t, double delta,
                             const EpsModel& model, double x1) {
  const SlopePair s = one_sided_slopes(limit_sol, t, x1);
  const double jump = s.right - s.left;
  if (std::fabs(jump) <= 1e-9) {
    throw Error(ErrorCode::DegenerateJump, "slope jump " + std::to_string(jump) + " is below 1e-9");
  }
  ConjectureGap g{};
  g.lhs = weighted_velocity(sol, t, delta, model);
  g.rhs = jump / (2.0 * std::log(model.eps()));
  g.ratio = std::fabs(g.rhs) > 1e-9 ? g.lhs / g.rhs : std::numeric_limits<double>::quiet_NaN();
  g.left_slope = s.left;
  g.right_slope = s.right;
  return g;
}

double default_delta(double eps) {
  if (!(eps > 0.0 && eps < 1.0)) throw Error(ErrorCode::DomainError, "default delta needs 0 < eps < 1");
  return 1.0 / std::log(1.0 / eps);
}

double fit_slope(std::span<const double> xs, std::span<const double> ys, double lo, double hi) {
  double sx = 0.0, sy = 0.0;
  std::size_t m = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (xs[i] >= lo && xs[i] <= hi) {
      sx += xs[i];
      sy += ys[i];
      ++m;
    }
  }
  if (m < 2) throw Error(ErrorCode::InvalidArgument, "fewer than two points in the fit window");
  const double mx = sx / m, my = sy / m;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (xs[i] >= lo && xs[i] <= hi) {
      sxy += (xs[i] - mx) * (ys[i] - my);
      sxx += (xs[i] - mx) * (xs[i] - mx);
    }
  }
  if (sxx == 0.0) throw Error(ErrorCode::InvalidArgument, "degenerate fit window");
  return sxy / sxx;
}

}  // namespace fbsim
