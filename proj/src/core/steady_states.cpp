#include "fbsim/steady_states.hpp"

#include <cmath>
#include <limits>

#include "fbsim/error.hpp"

namespace fbsim {

SteadySpec::SteadySpec(double a, double b) : a_slope(a), b_slope(b) {
  if (!(a > 0.0 && b > 0.0)) throw Error(ErrorCode::InvalidArgument, "steady-state slopes must be positive");
}

double SteadySpec::support_right() const noexcept {
  if (b_slope >= 1.0) return std::numeric_limits<double>::infinity();
  return std::log((1.0 + b_slope) / (1.0 - b_slope));
}

double SteadySpec::support_left() const noexcept {
  if (a_slope >= 1.0) return -std::numeric_limits<double>::infinity();
  return -std::log((1.0 + a_slope) / (1.0 - a_slope));
}

double w_plus(const SteadySpec& spec, double x) {
  if (x < 0.0) throw Error(ErrorCode::DomainError, "w_plus is defined for x >= 0");
  if (x >= spec.support_right()) return 0.0;
  return std::fmax(spec.b_slope * std::sinh(x) - std::cosh(x) + 1.0, 0.0);
}

double w_minus(const SteadySpec& spec, double x) {
  if (x > 0.0) throw Error(ErrorCode::DomainError, "w_minus is defined for x <= 0");
  if (x <= spec.support_left()) return 0.0;
  return std::fmin(spec.a_slope * std::sinh(x) + std::cosh(x) - 1.0, 0.0);
}

double w_ab(const SteadySpec& spec, double x) { return x <= 0.0 ? w_minus(spec, x) : w_plus(spec, x); }

double w_plus_derivative(const SteadySpec& spec, double x) {
  if (x < 0.0) throw Error(ErrorCode::DomainError, "w_plus is defined for x >= 0");
  if (x >= spec.support_right()) return 0.0;
  return spec.b_slope * std::cosh(x) - std::sinh(x);
}

double w_minus_derivative(const SteadySpec& spec, double x) {
  if (x > 0.0) throw Error(ErrorCode::DomainError, "w_minus is defined for x <= 0");
  if (x <= spec.support_left()) return 0.0;
  return spec.a_slope * std::cosh(x) + std::sinh(x);
}

double w_ab_derivative(const SteadySpec& spec, double x) {
  return x <= 0.0 ? w_minus_derivative(spec, x) : w_plus_derivative(spec, x);
}

Inflection inflection(const SteadySpec& spec) {
  const double a = spec.a_slope;
  if (!(a > 1.0)) throw Error(ErrorCode::NotApplicable, "inflection point exists only for A > 1");
  return {-0.5 * std::log((a + 1.0) / (a - 1.0)), std::sqrt(a * a - 1.0)};
}

std::vector<double> residual_limit_equation(std::span<const double> u, double grid_spacing,
                                            double positivity_threshold) {
  const std::size_t n = u.size();
  if (n < 3) throw Error(ErrorCode::GridTooSmall, "residual needs at least 3 nodes");
  std::vector<double> res(n, 0.0);
  const double inv_h2 = 1.0 / (grid_spacing * grid_spacing);
  for (std::size_t j = 1; j + 1 < n; ++j) {
    const double l = u[j - 1], c = u[j], r = u[j + 1];
    const bool positive = l > positivity_threshold && c > positivity_threshold && r > positivity_threshold;
    const bool negative = l < -positivity_threshold && c < -positivity_threshold && r < -positivity_threshold;
    if (!positive && !negative) continue;
    const double uxx = (l - 2.0 * c + r) * inv_h2;
    res[j] = std::fabs(c) * uxx + c * (1.0 - std::fabs(c));
  }
  return res;
}

}  // namespace fbsim
