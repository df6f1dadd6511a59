#include "fbsim/pde_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "fbsim/error.hpp"

namespace fbsim {

Grid::Grid(double a, double b, int n_cells) : a_(a), b_(b), n_cells_(n_cells), h_(0.0) {
  if (!(std::isfinite(a) && std::isfinite(b) && a < b)) {
    throw Error(ErrorCode::InvalidArgument, "grid needs finite a < b");
  }
  if (n_cells < 8) throw Error(ErrorCode::InvalidArgument, "grid needs at least 8 cells");
  h_ = (b - a) / n_cells;
}

std::vector<double> Grid::nodes() const {
  std::vector<double> xs(n_nodes());
  for (std::size_t j = 0; j < xs.size(); ++j) xs[j] = x(j);
  return xs;
}

long Grid::node_index(double x) const noexcept {
  const double s = (x - a_) / h_;
  const double j = std::round(s);
  if (j < 0.0 || j > n_cells_ || std::fabs(s - j) > 1e-9) return -1;
  return static_cast<long>(j);
}

const char* to_string(InitialKind k) noexcept {
  switch (k) {
    case InitialKind::MonotoneTanhLike: return "MonotoneTanhLike";
    case InitialKind::MultiZero: return "MultiZero";
    case InitialKind::FlatExponential: return "FlatExponential";
  }
  return "unknown";
}

namespace {

void check_zeros(const InitialData& data, const Grid& grid) {
  const auto& z = data.zeros;
  if (z.empty()) throw Error(ErrorCode::BadZeros, "at least one zero is required");
  if (z.size() % 2 == 0) {
    throw Error(ErrorCode::BadZeros, "an even number of zeros cannot connect the boundary values -1 and +1");
  }
  if (data.kind != InitialKind::MultiZero && z.size() != 1) {
    throw Error(ErrorCode::BadZeros, std::string(to_string(data.kind)) + " takes exactly one zero");
  }
  // Every sign interval must own at least one node strictly inside it.
  double prev = grid.a();
  for (std::size_t i = 0; i <= z.size(); ++i) {
    const double next = i < z.size() ? z[i] : grid.b();
    if (i < z.size() && !(z[i] > grid.a() && z[i] < grid.b())) {
      throw Error(ErrorCode::BadZeros, "zeros must lie strictly inside (a, b)");
    }
    if (!(next > prev)) throw Error(ErrorCode::BadZeros, "zeros must be strictly increasing");
    const double first_inside = std::floor((prev - grid.a()) / grid.h()) + 1.0;
    if (grid.a() + first_inside * grid.h() >= next) {
      throw Error(ErrorCode::BadZeros, "the grid has no node between consecutive sign changes");
    }
    prev = next;
  }
}

std::vector<double> monotone_profile(const InitialData& d, const Grid& grid, double amp) {
  if (!(d.steepness > 0.0) || !(std::fabs(d.skew) < 1.0) || !(d.skew_width > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "MonotoneTanhLike needs steepness > 0, |skew| < 1, skew_width > 0");
  }
  const double x1 = d.zeros[0];
  auto raw = [&](double x) {
    const double y = x - x1;
    return std::tanh(d.steepness * y * (1.0 + d.skew * std::tanh(y / d.skew_width)));
  };
  // A quadratic in the raw profile fixes the end values while keeping the zero.
  const double ra = -raw(grid.a());
  const double rb = raw(grid.b());
  const double den = ra * rb * (ra + rb);
  const double lambda = (ra * ra + rb * rb) / den;
  const double mu = (ra - rb) / den;
  if (!(lambda - 2.0 * mu * ra > 0.0 && lambda + 2.0 * mu * rb > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "MonotoneTanhLike normalisation is not monotone; increase steepness");
  }
  std::vector<double> u(grid.n_nodes());
  for (std::size_t j = 0; j < u.size(); ++j) {
    const double r = raw(grid.x(j));
    u[j] = amp * r * (lambda + mu * r);
  }
  for (std::size_t j = 1; j < u.size(); ++j) {
    if (!(u[j] > u[j - 1])) {
      throw Error(ErrorCode::InvalidArgument, "MonotoneTanhLike parameters give a non-increasing profile");
    }
  }
  return u;
}

std::vector<double> multi_zero_profile(const InitialData& d, const Grid& grid, double amp) {
  if (!(d.steepness > 0.0)) throw Error(ErrorCode::InvalidArgument, "MultiZero needs steepness > 0");
  auto g = [&](double x) {
    double p = 1.0;
    for (double z : d.zeros) p *= std::tanh(d.steepness * (x - z));
    return p;
  };
  // Multiplying by a positive affine factor keeps the zeros and the signs.
  const double la = amp / std::fabs(g(grid.a()));
  const double lb = amp / g(grid.b());
  const double len = grid.b() - grid.a();
  std::vector<double> u(grid.n_nodes());
  for (std::size_t j = 0; j < u.size(); ++j) {
    const double x = grid.x(j);
    const double s = (x - grid.a()) / len;
    u[j] = g(x) * ((1.0 - s) * la + s * lb);
  }
  return u;
}

std::vector<double> flat_profile(const InitialData& d, const Grid& grid, double amp) {
  const double x1 = d.zeros[0];
  const double left_scale = std::exp(-1.0 / (x1 - grid.a()));
  const double right_scale = std::exp(-1.0 / (grid.b() - x1));
  std::vector<double> u(grid.n_nodes());
  for (std::size_t j = 0; j < u.size(); ++j) {
    const double y = grid.x(j) - x1;
    if (y > 0.0) {
      u[j] = amp * std::exp(-1.0 / y) / right_scale;
    } else if (y < 0.0) {
      u[j] = -amp * std::exp(1.0 / y) / left_scale;
    } else {
      u[j] = 0.0;
    }
  }
  return u;
}

void thomas(std::vector<double>& lower, std::vector<double>& diag, std::vector<double>& upper,
            std::vector<double>& rhs) {
  const std::size_t n = diag.size();
  for (std::size_t i = 1; i < n; ++i) {
    const double m = lower[i] / diag[i - 1];
    diag[i] -= m * upper[i - 1];
    rhs[i] -= m * rhs[i - 1];
  }
  rhs[n - 1] /= diag[n - 1];
  for (std::size_t i = n - 1; i-- > 0;) rhs[i] = (rhs[i] - upper[i] * rhs[i + 1]) / diag[i];
}

void check_output_times(const std::vector<double>& outs, double T) {
  if (outs.empty() || outs.front() != 0.0) {
    throw Error(ErrorCode::InvalidArgument, "output times must start at 0");
  }
  for (std::size_t k = 1; k < outs.size(); ++k) {
    if (!(outs[k] > outs[k - 1])) throw Error(ErrorCode::InvalidArgument, "output times must increase");
  }
  if (outs.back() > T * (1.0 + 1e-12)) throw Error(ErrorCode::InvalidArgument, "output time beyond T");
}

// Backward-Euler diffusion with coefficient D(u^n), forward-Euler reaction R(u^n).
// `coeff(j, u_j)` returns {D, R} at an interior node.
template <class Coeff>
PdeSolution run_imex(const Grid& grid, std::vector<double> u, const std::vector<double>& outs, double dt,
                     const BoundaryFn& left, const BoundaryFn& right, Coeff&& coeff, SchemeMeta meta) {
  const std::size_t n = u.size();
  const double held_left = u.front();
  const double held_right = u.back();
  const double inv_h2 = 1.0 / (grid.h() * grid.h());
  std::vector<double> lower(n), diag(n), upper(n), rhs(n);

  PdeSolution sol{grid, {0.0}, {u}, meta};
  sol.meta.dt = dt;
  double t = 0.0;
  for (std::size_t k = 1; k < outs.size(); ++k) {
    const double target = outs[k];
    while (t < target) {
      const bool last = target - t <= dt * (1.0 + 1e-9);
      const double step = last ? target - t : dt;
      const double t_new = last ? target : t + step;
      const double r = step * inv_h2;
      diag[0] = 1.0;
      upper[0] = 0.0;
      rhs[0] = left ? left(t_new) : held_left;
      lower[n - 1] = 0.0;
      diag[n - 1] = 1.0;
      rhs[n - 1] = right ? right(t_new) : held_right;
      for (std::size_t j = 1; j + 1 < n; ++j) {
        const auto [d, react] = coeff(j, u[j]);
        lower[j] = -r * d;
        upper[j] = -r * d;
        diag[j] = 1.0 + 2.0 * r * d;
        rhs[j] = u[j] + step * react;
      }
      thomas(lower, diag, upper, rhs);
      for (std::size_t j = 0; j < n; ++j) {
        if (!std::isfinite(rhs[j])) {
          throw Error(ErrorCode::StepRejected,
                      "non-finite value at t = " + std::to_string(t_new) + ", x = " + std::to_string(grid.x(j)));
        }
      }
      u.swap(rhs);
      t = t_new;
      ++sol.meta.steps;
      ++sol.meta.tridiagonal_solves;
    }
    sol.times.push_back(target);
    sol.profiles.push_back(u);
  }
  return sol;
}

void check_solve_args(const Grid& grid, std::span<const double> u0, double T, double dt) {
  if (u0.size() != grid.n_nodes()) throw Error(ErrorCode::InvalidArgument, "u0 does not match the grid");
  if (!(dt > 0.0) || !std::isfinite(dt)) throw Error(ErrorCode::InvalidArgument, "dt must be positive");
  if (!(T >= 0.0) || !std::isfinite(T)) throw Error(ErrorCode::InvalidArgument, "T must be nonnegative");
  for (double v : u0) {
    if (!std::isfinite(v)) throw Error(ErrorCode::InvalidArgument, "u0 has non-finite values");
  }
}

// Second-order one-sided derivatives at the two ends.
double dx_left(std::span<const double> u, double h) { return (-3.0 * u[0] + 4.0 * u[1] - u[2]) / (2.0 * h); }
double dx_right(std::span<const double> u, double h) {
  const std::size_t m = u.size() - 1;
  return (3.0 * u[m] - 4.0 * u[m - 1] + u[m - 2]) / (2.0 * h);
}

std::vector<double> gradient(std::span<const double> u, double h) {
  std::vector<double> g(u.size());
  for (std::size_t j = 1; j + 1 < u.size(); ++j) g[j] = (u[j + 1] - u[j - 1]) / (2.0 * h);
  g.front() = dx_left(u, h);
  g.back() = dx_right(u, h);
  return g;
}

double trapezoid(std::span<const double> f, double h) {
  double s = 0.5 * (f.front() + f.back());
  for (std::size_t j = 1; j + 1 < f.size(); ++j) s += f[j];
  return s * h;
}

}  // namespace

std::vector<double> make_profile(const InitialData& data, const Grid& grid, double amplitude) {
  if (!(amplitude > 0.0)) throw Error(ErrorCode::InvalidArgument, "amplitude must be positive");
  check_zeros(data, grid);
  std::vector<double> u;
  switch (data.kind) {
    case InitialKind::MonotoneTanhLike: u = monotone_profile(data, grid, amplitude); break;
    case InitialKind::MultiZero: u = multi_zero_profile(data, grid, amplitude); break;
    case InitialKind::FlatExponential: u = flat_profile(data, grid, amplitude); break;
  }
  u.front() = -amplitude;
  u.back() = amplitude;
  for (double z : data.zeros) {
    const long j = grid.node_index(z);
    if (j >= 0) u[static_cast<std::size_t>(j)] = 0.0;
  }
  return u;
}

std::vector<double> make_initial(const EpsModel& model, const InitialData& data, const Grid& grid) {
  return make_profile(data, grid, model.u1());
}

std::size_t PdeSolution::time_index(double t) const {
  if (times.empty()) throw Error(ErrorCode::InvalidArgument, "solution has no stored times");
  const auto it = std::lower_bound(times.begin(), times.end(), t);
  if (it == times.begin()) return 0;
  if (it == times.end()) return times.size() - 1;
  const std::size_t k = static_cast<std::size_t>(it - times.begin());
  return (t - times[k - 1] <= times[k] - t) ? k - 1 : k;
}

std::vector<double> default_output_times(double T, int n_uniform, int n_geometric) {
  if (!(T >= 0.0)) throw Error(ErrorCode::InvalidArgument, "T must be nonnegative");
  if (n_uniform < 1 || n_geometric < 0) throw Error(ErrorCode::InvalidArgument, "bad output-time counts");
  std::vector<double> ts{0.0};
  if (T == 0.0) return ts;
  const double first = T / n_uniform;
  for (int g = n_geometric; g >= 1; --g) ts.push_back(std::ldexp(first, -g));
  for (int k = 1; k <= n_uniform; ++k) ts.push_back(k == n_uniform ? T : k * first);
  return ts;
}

std::vector<double> uniform_output_times(double T, double dt_out) {
  if (!(T >= 0.0) || !(dt_out > 0.0)) throw Error(ErrorCode::InvalidArgument, "need T >= 0 and dt_out > 0");
  std::vector<double> ts{0.0};
  const long m = std::lround(std::ceil(T / dt_out - 1e-9));
  for (long k = 1; k <= m; ++k) ts.push_back(k == m ? T : static_cast<double>(k) * dt_out);
  return ts;
}

PdeSolution solve_eps(const EpsModel& model, const Grid& grid, std::span<const double> u0, double T, double dt,
                      const SolveOptions& opts) {
  check_solve_args(grid, u0, T, dt);
  const std::vector<double> outs = opts.output_times.empty() ? default_output_times(T) : opts.output_times;
  check_output_times(outs, T);

  std::vector<double> phi(u0.size());
  for (std::size_t j = 0; j < u0.size(); ++j) phi[j] = model.phi_from_u(u0[j]);
  auto coeff = [&](std::size_t j, double uj) {
    const auto c = model.coefficients(uj, phi[j]);
    phi[j] = c.phi;
    return std::pair<double, double>{c.diffusivity, c.reaction};
  };
  SchemeMeta meta;
  meta.problem = "eps";
  meta.eps = model.eps();
  return run_imex(grid, std::vector<double>(u0.begin(), u0.end()), outs, dt, opts.left_boundary,
                  opts.right_boundary, coeff, meta);
}

PdeSolution solve_positive_branch(const Grid& segment, std::span<const double> u0_pos, double left_value,
                                  double right_value, double n, double T, double dt,
                                  const std::vector<double>& output_times) {
  check_solve_args(segment, u0_pos, T, dt);
  if (!(n >= 1.0) || !std::isfinite(n) || std::floor(n) != n) {
    throw Error(ErrorCode::InvalidArgument, "n must be a positive integer");
  }
  const std::vector<double> outs = output_times.empty() ? default_output_times(T) : output_times;
  check_output_times(outs, T);
  const double lift = 1.0 / n;
  std::vector<double> v(u0_pos.size());
  for (std::size_t j = 0; j < v.size(); ++j) v[j] = u0_pos[j] + lift;
  v.front() = left_value + lift;
  v.back() = right_value + lift;
  auto coeff = [](std::size_t, double uj) { return std::pair<double, double>{uj, uj * (1.0 - uj)}; };
  SchemeMeta meta;
  meta.problem = "limit";
  meta.n = n;
  return run_imex(segment, std::move(v), outs, dt, {}, {}, coeff, meta);
}

std::vector<PdeSolution> solve_limit_interval(const Grid& segment, std::span<const double> u0_pos, double T,
                                              const LimitOptions& opts) {
  if (u0_pos.size() != segment.n_nodes()) throw Error(ErrorCode::InvalidArgument, "u0 does not match the grid");
  for (std::size_t j = 1; j + 1 < u0_pos.size(); ++j) {
    if (!(u0_pos[j] > 0.0)) throw Error(ErrorCode::InvalidArgument, "u0 must be positive inside the segment");
  }
  if (opts.n_sequence.empty()) throw Error(ErrorCode::InvalidArgument, "n_sequence is empty");
  for (std::size_t i = 0; i < opts.n_sequence.size(); ++i) {
    if (opts.n_sequence[i] <= 0 || (i > 0 && opts.n_sequence[i] <= opts.n_sequence[i - 1])) {
      throw Error(ErrorCode::InvalidArgument, "n_sequence must be positive and increasing");
    }
  }
  std::vector<PdeSolution> out;
  out.reserve(opts.n_sequence.size());
  for (double n : opts.n_sequence) {
    out.push_back(solve_positive_branch(segment, u0_pos, 0.0, 0.0, n, T, opts.dt, opts.output_times));
  }
  return out;
}

PdeSolution solve_limit(const Grid& grid, const InitialData& data, double T, const LimitOptions& opts) {
  const std::vector<double> u0 = make_profile(data, grid, 1.0);
  std::vector<std::size_t> cuts{0};
  for (double z : data.zeros) {
    const long j = grid.node_index(z);
    if (j < 0) throw Error(ErrorCode::BadZeros, "zero " + std::to_string(z) + " is not a grid node");
    cuts.push_back(static_cast<std::size_t>(j));
  }
  cuts.push_back(grid.n_nodes() - 1);
  for (std::size_t s = 0; s + 1 < cuts.size(); ++s) {
    if (cuts[s + 1] - cuts[s] < 8) throw Error(ErrorCode::BadZeros, "fewer than 8 cells between sign changes");
  }
  if (opts.n_sequence.empty()) throw Error(ErrorCode::InvalidArgument, "n_sequence is empty");
  const double n = *std::max_element(opts.n_sequence.begin(), opts.n_sequence.end());
  const double lift = 1.0 / n;
  const std::vector<double> outs = opts.output_times.empty() ? default_output_times(T) : opts.output_times;

  std::vector<PdeSolution> parts;
  std::vector<double> signs;
  for (std::size_t s = 0; s + 1 < cuts.size(); ++s) {
    const std::size_t j0 = cuts[s], j1 = cuts[s + 1];
    const Grid seg(grid.x(j0), grid.x(j1), static_cast<int>(j1 - j0));
    const double sign = u0[(j0 + j1) / 2] > 0.0 ? 1.0 : -1.0;
    std::vector<double> pos(j1 - j0 + 1);
    for (std::size_t j = j0; j <= j1; ++j) pos[j - j0] = std::fabs(u0[j]);
    const double left_value = j0 == 0 ? 1.0 : 0.0;
    const double right_value = j1 == grid.n_nodes() - 1 ? 1.0 : 0.0;
    parts.push_back(solve_positive_branch(seg, pos, left_value, right_value, n, T, opts.dt, outs));
    signs.push_back(sign);
  }

  PdeSolution sol{grid, parts.front().times, {}, parts.front().meta};
  sol.meta.tridiagonal_solves = 0;
  for (const auto& p : parts) sol.meta.tridiagonal_solves += p.meta.tridiagonal_solves;
  for (std::size_t k = 0; k < sol.times.size(); ++k) {
    std::vector<double> u(grid.n_nodes());
    for (std::size_t s = 0; s < parts.size(); ++s) {
      const auto& v = parts[s].profiles[k];
      for (std::size_t i = 0; i < v.size(); ++i) u[cuts[s] + i] = signs[s] * (v[i] - lift);
    }
    for (std::size_t s = 1; s + 1 < cuts.size(); ++s) u[cuts[s]] = 0.0;
    u.front() = u0.front();
    u.back() = u0.back();
    sol.profiles.push_back(std::move(u));
  }
  sol.profiles.front() = u0;
  return sol;
}

PdeSolution stationary_solution(const Grid& grid, std::vector<double> profile, std::vector<double> times) {
  if (profile.size() != grid.n_nodes()) throw Error(ErrorCode::InvalidArgument, "profile does not match the grid");
  if (times.empty()) throw Error(ErrorCode::InvalidArgument, "need at least one time");
  PdeSolution sol{grid, std::move(times), {}, {}};
  sol.meta.problem = "stationary";
  sol.profiles.assign(sol.times.size(), profile);
  return sol;
}

double aronson_benilan_check(const PdeSolution& sol, double t0) {
  if (!(t0 > 0.0)) throw Error(ErrorCode::InvalidArgument, "t0 must be positive");
  const auto first = std::lower_bound(sol.times.begin(), sol.times.end(), t0);
  const std::size_t k0 = static_cast<std::size_t>(first - sol.times.begin());
  if (sol.times.size() < k0 + 2) throw Error(ErrorCode::NeedsTwoTimes, "fewer than two stored times >= t0");
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t k = k0; k + 1 < sol.times.size(); ++k) {
    const double t = sol.times[k];
    const double dt = sol.times[k + 1] - t;
    const auto& u = sol.profiles[k];
    const auto& un = sol.profiles[k + 1];
    for (std::size_t j = 1; j + 1 < u.size(); ++j) {
      if (u[j] == 0.0) continue;
      const double ut = (un[j] - u[j]) / dt;
      best = std::min(best, std::copysign(1.0, u[j]) * (t * ut + u[j]));
    }
  }
  return best;
}

std::vector<double> energy_estimate(std::span<const PdeSolution> seq, double alpha) {
  if (!(alpha > -1.0)) throw Error(ErrorCode::InvalidArgument, "alpha must exceed -1");
  const double pref = 4.0 * (alpha + 1.0) / ((alpha + 2.0) * (alpha + 2.0));
  const double power = 0.5 * (alpha + 2.0);
  std::vector<double> out;
  for (const auto& sol : seq) {
    if (sol.meta.n <= 0) throw Error(ErrorCode::InvalidArgument, "energy estimate needs a lifted solution");
    const double h = sol.grid.h();
    const double weight = std::pow(sol.meta.n, -(alpha + 1.0));
    std::vector<double> per_time(sol.times.size());
    for (std::size_t k = 0; k < sol.times.size(); ++k) {
      const auto& u = sol.profiles[k];
      double grad = 0.0;
      for (std::size_t j = 0; j + 1 < u.size(); ++j) {
        const double d = (std::pow(u[j + 1], power) - std::pow(u[j], power)) / h;
        grad += d * d * h;
      }
      per_time[k] = pref * grad + weight * (std::fabs(dx_right(u, h)) + std::fabs(dx_left(u, h)));
    }
    double total = 0.0;
    for (std::size_t k = 0; k + 1 < sol.times.size(); ++k) {
      total += 0.5 * (per_time[k] + per_time[k + 1]) * (sol.times[k + 1] - sol.times[k]);
    }
    out.push_back(total);
  }
  return out;
}

TestFunction polynomial_bump(double xl, double xr, double T) {
  return {
      [=](double x, double t) { return (x - xl) * (xr - x) * (T - t); },
      [=](double x, double) { return -(x - xl) * (xr - x); },
      [=](double x, double t) { return (xr + xl - 2.0 * x) * (T - t); },
  };
}

double weak_residual(const PdeSolution& sol, const TestFunction& psi) {
  if (!psi.value || !psi.dt || !psi.dx) throw Error(ErrorCode::BadTestFunction, "test function is incomplete");
  const Grid& g = sol.grid;
  const std::size_t m = g.n_nodes();
  const double T = sol.times.back();
  double scale = 1.0;
  for (std::size_t j = 0; j < m; ++j) scale = std::max(scale, std::fabs(psi.value(g.x(j), sol.times.front())));
  const double tol = 1e-10 * scale;
  for (double t : sol.times) {
    if (std::fabs(psi.value(g.a(), t)) > tol || std::fabs(psi.value(g.b(), t)) > tol) {
      throw Error(ErrorCode::BadTestFunction, "test function does not vanish at the ends of the segment");
    }
  }
  for (std::size_t j = 0; j < m; ++j) {
    if (std::fabs(psi.value(g.x(j), T)) > tol) {
      throw Error(ErrorCode::BadTestFunction, "test function does not vanish at the final time");
    }
  }

  std::vector<double> f(m);
  const double t_init = sol.times.front();
  const auto& u0 = sol.profiles.front();
  for (std::size_t j = 0; j < m; ++j) f[j] = u0[j] * psi.value(g.x(j), t_init);
  double result = trapezoid(f, g.h());

  std::vector<double> per_time(sol.times.size());
  for (std::size_t k = 0; k < sol.times.size(); ++k) {
    const double t = sol.times[k];
    const auto& u = sol.profiles[k];
    const auto ux = gradient(u, g.h());
    for (std::size_t j = 0; j < m; ++j) {
      const double x = g.x(j);
      const double p = psi.value(x, t);
      f[j] = u[j] * psi.dt(x, t) - u[j] * ux[j] * psi.dx(x, t) - ux[j] * ux[j] * p + u[j] * (1.0 - u[j]) * p;
    }
    per_time[k] = trapezoid(f, g.h());
  }
  for (std::size_t k = 0; k + 1 < sol.times.size(); ++k) {
    result += 0.5 * (per_time[k] + per_time[k + 1]) * (sol.times[k + 1] - sol.times[k]);
  }
  return result;
}

}  // namespace fbsim
