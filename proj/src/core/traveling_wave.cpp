#include "fbsim/traveling_wave.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "fbsim/error.hpp"
#include "fbsim/ode.hpp"

namespace fbsim {

namespace {

constexpr int kBisectionIters = 80;

// Root of g on [lo, hi] given g(lo) and g(hi) of opposite sign (or zero).
template <class G>
double bisect(G&& g, double lo, double hi) {
  double glo = g(lo);
  for (int i = 0; i < kBisectionIters; ++i) {
    const double mid = 0.5 * (lo + hi);
    const double gm = g(mid);
    if ((gm > 0.0) == (glo > 0.0)) {
      lo = mid;
      glo = gm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace

double velocity(const EpsModel& model, double a_slope, double b_slope) {
  if (!(model.eps() < 1.0)) {
    throw Error(ErrorCode::DomainError, "wave velocity needs eps < 1 so that log eps < 0");
  }
  return (b_slope - a_slope) / (2.0 * std::log(model.eps()));
}

const char* to_string(Termination t) noexcept {
  switch (t) {
    case Termination::ReachedHorizon: return "ReachedHorizon";
    case Termination::SlopeVanished: return "SlopeVanished";
    case Termination::HeightExceeded: return "HeightExceeded";
  }
  return "Unknown";
}

ShootingSpec::ShootingSpec(EpsModel m, double a, double b) : model(std::move(m)), a_slope(a), b_slope(b) {
  if (!(a > 0.0 && b > 0.0)) throw Error(ErrorCode::InvalidArgument, "shooting slopes must be positive");
}

double WaveProfile::at(double x) const {
  if (xs.empty() || x < xs.front() || x > xs.back()) {
    throw Error(ErrorCode::OutOfRange, "x outside the sampled wave");
  }
  auto it = std::upper_bound(xs.begin(), xs.end(), x);
  std::size_t j = it == xs.end() ? xs.size() - 1 : static_cast<std::size_t>(it - xs.begin());
  if (j == 0) return ws.front();
  return ode::hermite(xs[j - 1], xs[j], ws[j - 1], ws[j], slopes[j - 1], slopes[j], x);
}

double WaveProfile::slope_at(double x) const {
  if (xs.empty() || x < xs.front() || x > xs.back()) {
    throw Error(ErrorCode::OutOfRange, "x outside the sampled wave");
  }
  auto it = std::upper_bound(xs.begin(), xs.end(), x);
  std::size_t j = it == xs.end() ? xs.size() - 1 : static_cast<std::size_t>(it - xs.begin());
  if (j == 0) return slopes.front();
  return ode::hermite_derivative(xs[j - 1], xs[j], ws[j - 1], ws[j], slopes[j - 1], slopes[j], x);
}

WaveProfile shoot_right(const ShootingSpec& spec, double c, double slope0) {
  if (!(slope0 > 0.0)) throw Error(ErrorCode::InvalidArgument, "shooting slope must be positive");
  WaveProfile out;
  out.velocity = c;
  out.xs.push_back(0.0);
  out.ws.push_back(0.0);
  out.slopes.push_back(slope0);
  if (!(spec.x_max > 0.0)) return out;

  const EpsModel& model = spec.model;
  double phi_guess = 0.0;
  auto rhs = [&](double, const ode::State<2>& y) {
    const auto co = model.coefficients(y[0], phi_guess);
    phi_guess = co.phi;
    return ode::State<2>{y[1], (-c * y[1] - co.reaction) / co.diffusivity};
  };

  // Local error control well below step_tol keeps the accumulated error at step_tol scale.
  ode::Tolerances tol;
  tol.rtol = 1e-2 * spec.step_tol;
  tol.atol = 1e-2 * spec.step_tol;
  tol.h_init = spec.step_init;
  tol.h_min = 1e-14 * spec.x_max;
  tol.h_max = spec.x_max / 64.0;
  const double cap = spec.height_cap_factor * model.u1();

  ode::integrate<2>(rhs, 0.0, ode::State<2>{0.0, slope0}, spec.x_max, tol, [&](const ode::Step<2>& s) {
    if (s.y1[1] <= spec.slope_floor) {
      auto slope = [&](double x) {
        return ode::hermite(s.t0, s.t1, s.y0[1], s.y1[1], s.f0[1], s.f1[1], x) - spec.slope_floor;
      };
      const double xv = bisect(slope, s.t0, s.t1);
      out.xs.push_back(xv);
      out.ws.push_back(ode::hermite(s.t0, s.t1, s.y0[0], s.y1[0], s.f0[0], s.f1[0], xv));
      out.slopes.push_back(spec.slope_floor);
      out.terminated_reason = Termination::SlopeVanished;
      return false;
    }
    if (s.y1[0] > cap) {
      auto height = [&](double x) { return ode::hermite(s.t0, s.t1, s.y0[0], s.y1[0], s.f0[0], s.f1[0], x) - cap; };
      const double xc = bisect(height, s.t0, s.t1);
      out.xs.push_back(xc);
      out.ws.push_back(cap);
      out.slopes.push_back(ode::hermite(s.t0, s.t1, s.y0[1], s.y1[1], s.f0[1], s.f1[1], xc));
      out.terminated_reason = Termination::HeightExceeded;
      return false;
    }
    out.xs.push_back(s.t1);
    out.ws.push_back(s.y1[0]);
    out.slopes.push_back(s.y1[1]);
    return true;
  });
  return out;
}

WaveProfile shoot_left(const ShootingSpec& spec, double c, double slope0) {
  // W(z) = -w(-z) solves the right-going problem with velocity -c.
  WaveProfile mirrored = shoot_right(spec, -c, slope0);
  WaveProfile out;
  out.velocity = c;
  out.terminated_reason = mirrored.terminated_reason;
  out.left_terminated_reason = mirrored.terminated_reason;
  const std::size_t n = mirrored.xs.size();
  out.xs.resize(n);
  out.ws.resize(n);
  out.slopes.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t k = n - 1 - i;
    out.xs[i] = -mirrored.xs[k];
    out.ws[i] = -mirrored.ws[k];
    out.slopes[i] = mirrored.slopes[k];
  }
  out.xs.back() = 0.0;
  return out;
}

WaveProfile build_wave(const ShootingSpec& spec) {
  const double c = spec.velocity();
  const double s0 = spec.shoot_slope();
  WaveProfile left = shoot_left(spec, c, s0);
  WaveProfile right = shoot_right(spec, c, s0);
  WaveProfile out;
  out.velocity = c;
  out.terminated_reason = right.terminated_reason;
  out.left_terminated_reason = left.terminated_reason;
  out.xs.assign(left.xs.begin(), left.xs.end() - 1);
  out.ws.assign(left.ws.begin(), left.ws.end() - 1);
  out.slopes.assign(left.slopes.begin(), left.slopes.end() - 1);
  out.xs.insert(out.xs.end(), right.xs.begin(), right.xs.end());
  out.ws.insert(out.ws.end(), right.ws.begin(), right.ws.end());
  out.slopes.insert(out.slopes.end(), right.slopes.begin(), right.slopes.end());
  return out;
}

namespace {

struct PhaseSystem {
  const EpsModel& model;
  double c;
  double phi_guess = 0.0;

  ode::State<2> operator()(double w, const ode::State<2>& y) {
    const auto co = model.coefficients(w, phi_guess);
    phi_guess = co.phi;
    const double p = y[0];
    const double dp = -c / co.diffusivity - co.phi * (1.0 - co.phi * co.phi) / (p * std::sqrt(co.diffusivity));
    return {dp, 1.0 / p};
  }
};

double start_height(const EpsModel& model, const PhaseOptions& opts) {
  return opts.w_start < 0.0 ? std::min(1e-8, 1e-2 * model.eps()) : opts.w_start;
}

// q = p + c A_eps(w) is flat to O(w) near the origin, so the slope at the
// offset start height carries the -c A_eps(w_start) shift of the layer.
double start_slope(const EpsModel& model, double c, double slope0, double w_start) {
  return slope0 - c * model.a_transform(w_start);
}

ode::Tolerances phase_tolerances(const PhaseOptions& opts, double h_init) {
  ode::Tolerances tol;
  tol.rtol = opts.tol;
  tol.atol = opts.tol;
  tol.h_init = h_init;
  tol.h_min = 1e-22;
  tol.h_max = 0.05;
  return tol;
}

// Advances (w, y) to w_end; returns false when p fell to p_floor (state then at the crossing).
bool advance_phase(PhaseSystem& sys, double& w, ode::State<2>& y, double w_end, const PhaseOptions& opts,
                   std::vector<PhasePoint>* trail) {
  bool floored = false;
  const auto tol = phase_tolerances(opts, std::min(std::max(w, 1e-10), w_end - w));
  ode::integrate<2>(sys, w, y, w_end, tol, [&](const ode::Step<2>& s) {
    if (s.y1[0] <= opts.p_floor) {
      auto g = [&](double v) { return ode::hermite(s.t0, s.t1, s.y0[0], s.y1[0], s.f0[0], s.f1[0], v) - opts.p_floor; };
      const double wv = bisect(g, s.t0, s.t1);
      w = wv;
      y = {opts.p_floor, ode::hermite(s.t0, s.t1, s.y0[1], s.y1[1], s.f0[1], s.f1[1], wv)};
      floored = true;
      if (trail) trail->push_back({w, y[0], y[1]});
      return false;
    }
    w = s.t1;
    y = s.y1;
    if (trail) trail->push_back({w, y[0], y[1]});
    return true;
  });
  return !floored;
}

}  // namespace

std::vector<PhasePoint> phase_shoot(const EpsModel& model, double c, double slope0, double w_max,
                                    const PhaseOptions& opts) {
  if (!(slope0 > 0.0)) throw Error(ErrorCode::InvalidArgument, "phase shooting slope must be positive");
  std::vector<PhasePoint> out{{0.0, slope0, 0.0}};
  if (!(w_max > 0.0)) return out;
  const double ws = std::min(start_height(model, opts), 0.5 * w_max);
  PhaseSystem sys{model, c};
  double w = ws;
  ode::State<2> y{start_slope(model, c, slope0, ws), ws / slope0};
  out.push_back({w, y[0], y[1]});
  advance_phase(sys, w, y, w_max, opts, &out);
  return out;
}

std::vector<PhasePoint> phase_shoot_at(const EpsModel& model, double c, double slope0,
                                       std::span<const double> levels, const PhaseOptions& opts) {
  if (!(slope0 > 0.0)) throw Error(ErrorCode::InvalidArgument, "phase shooting slope must be positive");
  std::vector<PhasePoint> out;
  if (levels.empty()) return out;
  if (!(levels.front() > 0.0)) throw Error(ErrorCode::InvalidArgument, "phase levels must be positive");
  const double ws = std::min(start_height(model, opts), 0.5 * levels.front());
  PhaseSystem sys{model, c};
  double w = ws;
  ode::State<2> y{start_slope(model, c, slope0, ws), ws / slope0};
  for (double level : levels) {
    if (!(level > w)) throw Error(ErrorCode::InvalidArgument, "phase levels must increase");
    if (!advance_phase(sys, w, y, level, opts, nullptr)) break;
    out.push_back({level, y[0], y[1]});
  }
  return out;
}

std::vector<QPoint> q_diagnostic(const EpsModel& model, double c, std::span<const PhasePoint> phase) {
  if (phase.empty()) throw Error(ErrorCode::InvalidArgument, "empty phase trajectory");
  std::vector<QPoint> out;
  out.reserve(phase.size());
  for (const auto& pt : phase) out.push_back({pt.w, pt.p + c * model.a_transform(pt.w)});
  return out;
}

}  // namespace fbsim
