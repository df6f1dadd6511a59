#pragma once

#include <span>
#include <vector>

#include "fbsim/core_transform.hpp"

namespace fbsim {

/// Wave velocity (B - A) / (2 log eps) at which the left and right shooting
/// branches share both their velocity and their initial slope (A + B) / 2.
double velocity(const EpsModel& model, double a_slope, double b_slope);

struct ShootingSpec {
  EpsModel model;
  double a_slope;
  double b_slope;
  double x_max = 6.0;
  double step_init = 1e-4;
  /// Target accuracy of the sampled wave.
  double step_tol = 1e-9;
  /// HeightExceeded fires once |w| > height_cap_factor * u_{1eps}.
  double height_cap_factor = 10.0;
  /// SlopeVanished fires once w' <= slope_floor.
  double slope_floor = 1e-6;

  ShootingSpec(EpsModel m, double a, double b);

  double shoot_slope() const noexcept { return 0.5 * (a_slope + b_slope); }
  double velocity() const { return fbsim::velocity(model, a_slope, b_slope); }
};

enum class Termination { ReachedHorizon, SlopeVanished, HeightExceeded };

const char* to_string(Termination t) noexcept;

/// Sampled travelling wave, nodes in increasing x, with w(0) = 0 at a node.
struct WaveProfile {
  std::vector<double> xs;
  std::vector<double> ws;
  std::vector<double> slopes;
  double velocity = 0.0;
  Termination terminated_reason = Termination::ReachedHorizon;
  /// For merged waves, the termination of the x < 0 branch.
  Termination left_terminated_reason = Termination::ReachedHorizon;

  double x_min() const { return xs.front(); }
  double x_max() const { return xs.back(); }
  /// Cubic Hermite interpolation between nodes; x must lie in [x_min, x_max].
  double at(double x) const;
  double slope_at(double x) const;
};

/// Integrates -c w' = (eps + Phi^2(w)) w'' + R(w) from w(0) = 0, w'(0) = slope0
/// towards x > 0.
WaveProfile shoot_right(const ShootingSpec& spec, double c, double slope0);

/// Mirror of shoot_right towards x < 0 (nonpositive branch).
WaveProfile shoot_left(const ShootingSpec& spec, double c, double slope0);

/// Both branches with the shared slope (A + B) / 2 and velocity (B - A) / (2 log eps).
WaveProfile build_wave(const ShootingSpec& spec);

struct PhasePoint {
  double w;
  double p;  // slope w' as a function of the height w
  double x;  // int dw / p
};

struct PhaseOptions {
  double p_floor = 1e-6;
  double tol = 1e-12;
  /// Start height; a negative value selects min(1e-8, 1e-2 eps).
  double w_start = -1.0;
};

/// Slope-versus-height form p' = -c / (eps + Phi^2) - Phi (1 - Phi^2) / (p sqrt(eps + Phi^2)),
/// p(0) = slope0, integrated up to w_max or until p <= p_floor.
std::vector<PhasePoint> phase_shoot(const EpsModel& model, double c, double slope0, double w_max,
                                    const PhaseOptions& opts = {});

/// Same system evaluated exactly at the increasing heights `levels` (all > 0).
/// Levels past the point where p falls to p_floor are dropped.
std::vector<PhasePoint> phase_shoot_at(const EpsModel& model, double c, double slope0,
                                       std::span<const double> levels, const PhaseOptions& opts = {});

struct QPoint {
  double w;
  double q;
};

/// q(w) = p(w) + c A_eps(w); the near-origin transform of the slope.
std::vector<QPoint> q_diagnostic(const EpsModel& model, double c, std::span<const PhasePoint> phase);

}  // namespace fbsim
