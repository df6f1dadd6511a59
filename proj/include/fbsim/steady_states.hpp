#pragma once

#include <span>
#include <vector>

namespace fbsim {

/// One-sided slopes (A on the left, B on the right) of the sign-changing
/// steady state of u_t = |u| u_xx + u (1 - |u|):
///   w(x) = min{A sinh x + cosh x - 1, 0}   for x <= 0,
///   w(x) = max{B sinh x - cosh x + 1, 0}   for x > 0.
struct SteadySpec {
  double a_slope;
  double b_slope;

  SteadySpec(double a, double b);

  /// Right end of the positive support, +inf when B >= 1.
  double support_right() const noexcept;
  /// Left end of the negative support, -inf when A >= 1.
  double support_left() const noexcept;
};

double w_plus(const SteadySpec& spec, double x);
double w_minus(const SteadySpec& spec, double x);
double w_ab(const SteadySpec& spec, double x);

/// Analytic derivatives; zero outside the support.
double w_plus_derivative(const SteadySpec& spec, double x);
double w_minus_derivative(const SteadySpec& spec, double x);
double w_ab_derivative(const SteadySpec& spec, double x);

struct Inflection {
  double x_star;
  double min_slope;
};

/// Inflection point of the negative branch and its (minimal) slope sqrt(A^2 - 1).
/// Requires A > 1.
Inflection inflection(const SteadySpec& spec);

/// Pointwise residual |u| u_xx + u (1 - |u|) of the steady limit equation.
///
/// Evaluated only at interior nodes whose whole three-point stencil has the
/// same sign and magnitude above `positivity_threshold`; other entries are 0.
/// This keeps stencils from straddling the interface or a support edge.
std::vector<double> residual_limit_equation(std::span<const double> profile, double grid_spacing,
                                            double positivity_threshold = 1e-6);

}  // namespace fbsim
