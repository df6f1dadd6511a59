#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "fbsim/core_transform.hpp"

namespace fbsim {

/// Uniform grid x_j = a + j h, j = 0..n_cells.
class Grid {
 public:
  Grid(double a, double b, int n_cells);

  double a() const noexcept { return a_; }
  double b() const noexcept { return b_; }
  int n_cells() const noexcept { return n_cells_; }
  std::size_t n_nodes() const noexcept { return static_cast<std::size_t>(n_cells_) + 1; }
  double h() const noexcept { return h_; }
  double x(std::size_t j) const noexcept { return j + 1 == n_nodes() ? b_ : a_ + static_cast<double>(j) * h_; }
  std::vector<double> nodes() const;

  /// Index of the node at x, or -1 when x is not a node (to within 1e-9 h).
  long node_index(double x) const noexcept;

 private:
  double a_, b_;
  int n_cells_;
  double h_;
};

enum class InitialKind { MonotoneTanhLike, MultiZero, FlatExponential };

const char* to_string(InitialKind k) noexcept;

struct InitialData {
  InitialKind kind = InitialKind::MonotoneTanhLike;
  /// The nodal set N0, strictly increasing inside (a, b).
  std::vector<double> zeros;
  /// tanh steepness at the zeros (MonotoneTanhLike, MultiZero).
  double steepness = 4.0;
  /// MonotoneTanhLike: steepness becomes steepness*(1 -+ skew) left/right of the zero.
  double skew = 0.0;
  /// Width over which the skewed steepness switches sides.
  double skew_width = 0.05;
};

/// Profile with boundary values -amplitude / +amplitude vanishing exactly on the zeros.
std::vector<double> make_profile(const InitialData& data, const Grid& grid, double amplitude);

/// Initial data for the regularised problem: boundary values -+u_{1eps}.
std::vector<double> make_initial(const EpsModel& model, const InitialData& data, const Grid& grid);

struct SchemeMeta {
  std::string problem;  // "eps" or "limit"
  double dt = 0.0;
  double theta = 1.0;  // implicit weight of the diffusion term
  long steps = 0;
  long tridiagonal_solves = 0;
  double eps = 0.0;  // regularised runs
  double n = 0.0;    // limit-interval runs: boundary lift 1/n
};

struct PdeSolution {
  Grid grid;
  std::vector<double> times;
  std::vector<std::vector<double>> profiles;
  SchemeMeta meta;

  std::size_t time_index(double t) const;  // nearest stored time
};

/// t = 0, then geometric refinement towards 0 on (0, T / n_uniform], then a uniform grid up to T.
std::vector<double> default_output_times(double T, int n_uniform = 50, int n_geometric = 6);
std::vector<double> uniform_output_times(double T, double dt_out);

using BoundaryFn = std::function<double(double)>;

struct SolveOptions {
  /// Must start at 0 and increase; empty selects default_output_times(T).
  std::vector<double> output_times;
  /// Time-dependent Dirichlet data; empty holds the end values of u0.
  BoundaryFn left_boundary;
  BoundaryFn right_boundary;
};

/// IMEX finite differences for u_t = (eps + Phi^2(u)) u_xx + R(u): backward
/// Euler diffusion with the coefficient lagged at the previous step (one
/// tridiagonal solve per step), forward Euler reaction.
PdeSolution solve_eps(const EpsModel& model, const Grid& grid, std::span<const double> u0, double T, double dt,
                      const SolveOptions& opts = {});

/// n is integer-valued but held as a double: very flat data needs lifts far below 1e-18.
struct LimitOptions {
  double dt = 1e-3;
  std::vector<double> n_sequence{10, 40, 160};
  std::vector<double> output_times;
};

/// Solutions u_{i,n} of u_t = u (u_xx + 1 - u) on one nodal interval with
/// boundary value 1/n and initial data u0_pos + 1/n, one per n.
std::vector<PdeSolution> solve_limit_interval(const Grid& segment, std::span<const double> u0_pos, double T,
                                              const LimitOptions& opts = {});

/// Same approximation with the limit boundary values `left_value`, `right_value`
/// (0 at an interface, 1 at the outer boundary) lifted by 1/n.
PdeSolution solve_positive_branch(const Grid& segment, std::span<const double> u0_pos, double left_value,
                                  double right_value, double n, double T, double dt,
                                  const std::vector<double>& output_times);

/// Limit problem on the whole interval: every nodal interval is solved at the
/// largest n with its sign removed, shifted back by 1/n and re-signed, and the
/// zeros are pinned for all time. Zeros must be grid nodes.
PdeSolution solve_limit(const Grid& grid, const InitialData& data, double T, const LimitOptions& opts = {});

/// A solution that is constant in time (steady fixtures).
PdeSolution stationary_solution(const Grid& grid, std::vector<double> profile, std::vector<double> times);

/// min over interior nonzero nodes and stored times >= t0 of sgn(u) (t u_t + u).
double aronson_benilan_check(const PdeSolution& sol, double t0);

/// Per solution: 4(a+1)/(a+2)^2 iint ((u^{(a+2)/2})_x)^2 + int n^{-(a+1)} (|u_x(right)| + |u_x(left)|) dt.
std::vector<double> energy_estimate(std::span<const PdeSolution> seq, double alpha);

struct TestFunction {
  std::function<double(double, double)> value;
  std::function<double(double, double)> dt;
  std::function<double(double, double)> dx;
};

/// psi(x, t) = (x - xl) (xr - x) (T - t).
TestFunction polynomial_bump(double xl, double xr, double T);

/// int u0 psi(., 0) + iint (u psi_t - u u_x psi_x - u_x^2 psi + u (1 - u) psi) by the trapezoidal rule.
double weak_residual(const PdeSolution& sol, const TestFunction& psi);

}  // namespace fbsim
