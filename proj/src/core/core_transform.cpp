#include "fbsim/core_transform.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "fbsim/error.hpp"

namespace fbsim {

EpsModel::EpsModel(double eps, double newton_tol, int newton_max_iter)
    : eps_(eps),
      sqrt_eps_(std::sqrt(eps)),
      newton_tol_(newton_tol),
      newton_max_iter_(newton_max_iter),
      u1_(0.0) {
  if (!(eps > 0.0 && eps <= 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "eps must lie in (0, 1], got " + std::to_string(eps));
  }
  if (!(newton_tol > 0.0)) throw Error(ErrorCode::InvalidArgument, "newton_tol must be positive");
  if (newton_max_iter <= 0) throw Error(ErrorCode::InvalidArgument, "newton_max_iter must be positive");
  u1_ = u_from_phi(1.0);
}

double EpsModel::u_from_phi(double phi) const noexcept {
  const double a = std::fabs(phi);
  // asinh(z) = log(z + sqrt(1 + z^2)) without the cancellation of the log form for small z.
  const double value = a * std::sqrt(eps_ + a * a) + eps_ * std::asinh(a / sqrt_eps_);
  return std::copysign(value, phi);
}

double EpsModel::invert_abs(double a, double guess) const {
  if (a == 0.0) return 0.0;
  // U(phi) >= phi^2 and U(phi) >= 2 sqrt(eps) phi, so the root lies below both bounds.
  double lo = 0.0;
  double hi = std::min(std::sqrt(a), a / (2.0 * sqrt_eps_));
  double phi = std::clamp(guess, lo, hi);
  const double target_tol = newton_tol_ * (1.0 + a);
  for (int iter = 0; iter < newton_max_iter_; ++iter) {
    const double r = std::sqrt(eps_ + phi * phi);
    const double f = phi * r + eps_ * std::asinh(phi / sqrt_eps_) - a;
    if (f == 0.0) return phi;
    if (f > 0.0) {
      hi = phi;
    } else {
      lo = phi;
    }
    double next = phi - f / (2.0 * r);
    const bool newton_ok = next > lo && next < hi;
    // Past the residual test one more Newton step is taken: the residual alone
    // leaves an O(tol / sqrt(eps)) error in phi.
    if (std::fabs(f) <= target_tol) return newton_ok ? next : phi;
    if (!newton_ok) next = 0.5 * (lo + hi);
    if (next == phi) return phi;
    phi = next;
  }
  throw Error(ErrorCode::IterationLimit,
              "Phi_eps inversion did not converge for u = " + std::to_string(a) +
                  ", eps = " + std::to_string(eps_));
}

double EpsModel::phi_from_u(double u) const {
  return std::copysign(invert_abs(std::fabs(u), std::sqrt(std::fabs(u))), u);
}

double EpsModel::phi_from_u(double u, double guess) const {
  return std::copysign(invert_abs(std::fabs(u), std::fabs(guess)), u);
}

double EpsModel::diffusivity(double u) const {
  const double phi = phi_from_u(u);
  return eps_ + phi * phi;
}

double EpsModel::reaction(double u) const {
  const double phi = phi_from_u(u);
  return phi * (1.0 - phi * phi) * std::sqrt(eps_ + phi * phi);
}

double EpsModel::a_transform(double u) const {
  const double phi = phi_from_u(u);
  return 2.0 * std::asinh(phi / sqrt_eps_);
}

EpsModel::Coefficients EpsModel::coefficients(double u, double phi_guess) const {
  const double phi = phi_from_u(u, phi_guess);
  const double d = eps_ + phi * phi;
  return {phi, d, phi * (1.0 - phi * phi) * std::sqrt(d)};
}

RescaledPoint rescale_physical(const PhysicalParams& p, double x_phys, double t_phys) {
  if (!(p.d0 > 0.0 && p.d2 > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "D0 and D2 must be positive");
  }
  return {p.eps(), x_phys * std::sqrt(2.0 / p.d2), 2.0 * t_phys};
}

RescaledPoint to_physical(const PhysicalParams& p, double x, double t) {
  if (!(p.d0 > 0.0 && p.d2 > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "D0 and D2 must be positive");
  }
  return {p.eps(), x / std::sqrt(2.0 / p.d2), 0.5 * t};
}

double energy(const PhysicalParams& p, std::span<const double> phi, double grid_spacing) {
  const std::size_t n = phi.size();
  if (n < 3) throw Error(ErrorCode::GridTooSmall, "energy needs at least 3 nodes");
  if (!(grid_spacing > 0.0)) throw Error(ErrorCode::InvalidArgument, "grid spacing must be positive");
  const double h = grid_spacing;
  auto density = [&](std::size_t j) {
    double dphi;
    if (j == 0) {
      dphi = (-3.0 * phi[0] + 4.0 * phi[1] - phi[2]) / (2.0 * h);
    } else if (j == n - 1) {
      dphi = (3.0 * phi[n - 1] - 4.0 * phi[n - 2] + phi[n - 3]) / (2.0 * h);
    } else {
      dphi = (phi[j + 1] - phi[j - 1]) / (2.0 * h);
    }
    const double f = phi[j];
    const double well = -0.5 * f * f + 0.25 * f * f * f * f;
    return well + 0.5 * (p.d0 + p.d2 * f * f) * dphi * dphi;
  };
  double sum = 0.5 * (density(0) + density(n - 1));
  for (std::size_t j = 1; j + 1 < n; ++j) sum += density(j);
  return sum * h;
}

}  // namespace fbsim
