#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include "fbsim/error.hpp"

namespace fbsim::ode {

template <std::size_t N>
using State = std::array<double, N>;

struct Tolerances {
  double rtol = 1e-9;
  double atol = 1e-9;
  double h_init = 1e-4;
  double h_min = 1e-14;
  double h_max = 0.1;
  long max_steps = 10'000'000;
};

/// Accepted step of the integrator; the derivative values let callers build
/// cubic Hermite interpolants over [t0, t1].
template <std::size_t N>
struct Step {
  double t0, t1;
  State<N> y0, y1, f0, f1;
};

/// Explicit Dormand-Prince 5(4) with a PI step-size controller.
///
/// `rhs(t, y)` returns dy/dt. `on_step(step)` is called after every accepted
/// step and returns false to stop. Integration runs forward to `t_end >= t0`.
/// Returns the final time reached.
template <std::size_t N, class Rhs, class OnStep>
double integrate(Rhs&& rhs, double t0, State<N> y0, double t_end, const Tolerances& tol, OnStep&& on_step) {
  constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  constexpr double a21 = 1.0 / 5;
  constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
  constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                   a65 = -5103.0 / 18656;
  constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84;
  // Difference between the 5th- and embedded 4th-order weights.
  constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                   e6 = 22.0 / 525, e7 = -1.0 / 40;

  if (!(t_end >= t0)) throw Error(ErrorCode::InvalidArgument, "integration end precedes start");
  double t = t0;
  State<N> y = y0;
  State<N> k1 = rhs(t, y);
  double h = std::min(tol.h_init, tol.h_max);
  double err_prev = 1e-4;
  long steps = 0;
  State<N> tmp, k2, k3, k4, k5, k6, k7, y_new;

  while (t < t_end) {
    if (++steps > tol.max_steps) throw Error(ErrorCode::StepUnderflow, "step budget exhausted");
    bool last = false;
    if (t + h >= t_end) {
      h = t_end - t;
      last = true;
    }
    for (std::size_t i = 0; i < N; ++i) tmp[i] = y[i] + h * a21 * k1[i];
    k2 = rhs(t + c2 * h, tmp);
    for (std::size_t i = 0; i < N; ++i) tmp[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
    k3 = rhs(t + c3 * h, tmp);
    for (std::size_t i = 0; i < N; ++i) tmp[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
    k4 = rhs(t + c4 * h, tmp);
    for (std::size_t i = 0; i < N; ++i)
      tmp[i] = y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
    k5 = rhs(t + c5 * h, tmp);
    for (std::size_t i = 0; i < N; ++i)
      tmp[i] = y[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
    k6 = rhs(t + h, tmp);
    for (std::size_t i = 0; i < N; ++i)
      y_new[i] = y[i] + h * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] + b6 * k6[i]);
    k7 = rhs(t + h, y_new);

    double err = 0.0;
    bool finite = true;
    for (std::size_t i = 0; i < N; ++i) {
      const double ei = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
      const double sc = tol.atol + tol.rtol * std::max(std::fabs(y[i]), std::fabs(y_new[i]));
      err += (ei / sc) * (ei / sc);
      finite = finite && std::isfinite(y_new[i]);
    }
    err = std::sqrt(err / static_cast<double>(N));
    if (!finite || !std::isfinite(err)) err = 1e10;

    if (err <= 1.0) {
      Step<N> step{t, last ? t_end : t + h, y, y_new, k1, k7};
      t = step.t1;
      y = y_new;
      k1 = k7;
      double fac = 0.9 * std::pow(std::max(err, 1e-10), -0.7 / 5.0) * std::pow(err_prev, 0.4 / 5.0);
      fac = std::clamp(fac, 0.2, 5.0);
      err_prev = std::max(err, 1e-4);
      if (!on_step(step)) return t;
      h = std::min(h * fac, tol.h_max);
    } else {
      h *= std::clamp(0.9 * std::pow(err, -1.0 / 5.0), 0.1, 0.9);
    }
    if (h < tol.h_min && t < t_end) {
      throw Error(ErrorCode::StepUnderflow,
                  "adaptive step fell below " + std::to_string(tol.h_min) + " at t = " + std::to_string(t));
    }
  }
  return t;
}

/// Cubic Hermite value on [t0, t1] from endpoint values and derivatives.
inline double hermite(double t0, double t1, double y0, double y1, double f0, double f1, double t) {
  const double h = t1 - t0;
  if (h == 0.0) return y0;
  const double s = (t - t0) / h;
  const double s2 = s * s, s3 = s2 * s;
  return (2 * s3 - 3 * s2 + 1) * y0 + (s3 - 2 * s2 + s) * h * f0 + (-2 * s3 + 3 * s2) * y1 + (s3 - s2) * h * f1;
}

inline double hermite_derivative(double t0, double t1, double y0, double y1, double f0, double f1, double t) {
  const double h = t1 - t0;
  if (h == 0.0) return f0;
  const double s = (t - t0) / h;
  const double s2 = s * s;
  return ((6 * s2 - 6 * s) * y0 + (3 * s2 - 4 * s + 1) * h * f0 + (-6 * s2 + 6 * s) * y1 + (3 * s2 - 2 * s) * h * f1) / h;
}

}  // namespace fbsim::ode
