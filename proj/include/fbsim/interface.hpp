#pragma once

#include <span>
#include <vector>

#include "fbsim/core_transform.hpp"
#include "fbsim/pde_solver.hpp"

namespace fbsim {

struct InterfaceTrace {
  std::vector<double> times;
  std::vector<double> zeta;
  std::vector<double> zeta_rate;
};

struct SlopePair {
  double t;
  double left;
  double right;
};

enum class Side { Left, Right };

/// Root of the local cubic through the four nodes around the cell where the
/// increasing profile `u` crosses `level`.
double crossing(const Grid& grid, std::span<const double> u, double level);

/// Zero crossing per stored time; rates by centred differences (one-sided at the ends).
InterfaceTrace track(const PdeSolution& sol);

/// X(u, t) for a stored time t, from the same local cubic as `track`.
std::vector<double> x_of_u(const PdeSolution& sol, double t, std::span<const double> u_values);

/// Slope u_x at the point where the profile at stored time t takes the value `level`.
double slope_at_level(const PdeSolution& sol, double t, double level);

/// Weighted mean of X_t over |u| < delta with weight 1 / (eps + Phi^2(u)).
double weighted_velocity(const PdeSolution& sol, double t, double delta, const EpsModel& model);

/// The same mean obtained from the integrated form of the X equation:
/// -(B + 1/X_u(delta) - 1/X_u(-delta)) / (2 A(delta)) with
/// B = int Phi (1 - Phi^2) / sqrt(eps + Phi^2) X_u du.
double flux_velocity(const PdeSolution& sol, double t, double delta, const EpsModel& model);

/// One-sided limits of u_x at the zero x1, extrapolating q = u / (x - x1) linearly
/// from the three nearest nodes on each side. Uses the stored time nearest t.
SlopePair one_sided_slopes(const PdeSolution& sol, double t, double x1);

/// (t, slope) on one side for every stored t > 0.
std::vector<std::pair<double, double>> slope_history(const PdeSolution& sol, double x1, Side side);

/// First stored time at which the one-sided slope exceeds threshold, or +inf.
/// Afterwards t * slope must not fall below 90% of its value at that time.
double waiting_time(const PdeSolution& sol, double x1, Side side, double threshold);

struct ConjectureGap {
  double lhs;
  double rhs;
  double ratio;  // NaN unless |rhs| > 1e-9
  double left_slope;
  double right_slope;
};

ConjectureGap conjecture_gap(const PdeSolution& sol, const PdeSolution& limit_sol, double t, double delta,
                             const EpsModel& model, double x1);

/// 1 / log(1 / eps).
double default_delta(double eps);

/// Least-squares slope of ys against xs over xs in [lo, hi].
double fit_slope(std::span<const double> xs, std::span<const double> ys, double lo, double hi);

}  // namespace fbsim
