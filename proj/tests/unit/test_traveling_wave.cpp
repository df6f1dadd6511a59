#include <doctest.h>

#include <cmath>
#include <functional>
#include <vector>

#include "fbsim/error.hpp"
#include "fbsim/steady_states.hpp"
#include "fbsim/traveling_wave.hpp"

using namespace fbsim;

namespace {

double sup_error(const WaveProfile& w, double lo, double hi, const std::function<double(double)>& target) {
  double err = 0.0;
  for (int k = 0; k <= 600; ++k) {
    const double x = lo + (hi - lo) * k / 600.0;
    err = std::max(err, std::fabs(w.at(x) - target(x)));
  }
  return err;
}

}  // namespace

TEST_CASE("velocity law") {
  CHECK(velocity(EpsModel(1e-3), 1.0, 1.0) == 0.0);
  CHECK(velocity(EpsModel(1e-3), 2.0, 1.0) == doctest::Approx(0.07238).epsilon(1e-4));
  CHECK(velocity(EpsModel(1e-2), 1.0, 3.0) == doctest::Approx(-0.21715).epsilon(1e-4));
  CHECK_THROWS_AS(velocity(EpsModel(1.0), 2.0, 1.0), Error);
  const ShootingSpec s(EpsModel(1e-3), 2.0, 1.0);
  CHECK(s.shoot_slope() == 1.5);
  CHECK(s.velocity() > 0.0);
  CHECK(ShootingSpec(EpsModel(1e-3), 1.0, 2.0).velocity() < 0.0);
}

TEST_CASE("shoot_right converges to the closed form") {
  const ShootingSpec s(EpsModel(1e-4), 1.0, 1.0);
  const WaveProfile w = shoot_right(s, 0.0, 1.0);
  CHECK(w.xs.front() == 0.0);
  CHECK(w.ws.front() == 0.0);
  CHECK(w.x_max() >= 3.0);
  CHECK(sup_error(w, 0.0, 3.0, [](double x) { return 1.0 - std::exp(-x); }) <= 0.02);
  for (std::size_t k = 1; k < w.ws.size(); ++k) CHECK(w.ws[k] > w.ws[k - 1]);
}

TEST_CASE("shoot_right stops where the slope vanishes") {
  const ShootingSpec s(EpsModel(1e-2), 0.5, 0.5);
  const WaveProfile w = shoot_right(s, 0.0, 0.5);
  CHECK(w.terminated_reason == Termination::SlopeVanished);
  CHECK(w.x_max() == doctest::Approx(0.5 * std::log(3.0)).epsilon(0.15 / (0.5 * std::log(3.0))));
}

TEST_CASE("zero horizon gives the origin only") {
  ShootingSpec s(EpsModel(1e-2), 1.0, 1.0);
  s.x_max = 0.0;
  for (const auto& w : {shoot_right(s, 0.0, 1.0), shoot_left(s, 0.0, 1.0)}) {
    REQUIRE(w.xs.size() == 1);
    CHECK(w.xs[0] == 0.0);
    CHECK(w.ws[0] == 0.0);
    CHECK(w.terminated_reason == Termination::ReachedHorizon);
  }
}

TEST_CASE("shoot_right rejects a nonpositive initial slope") {
  const ShootingSpec s(EpsModel(1e-2), 1.0, 1.0);
  CHECK_THROWS_AS(shoot_right(s, 0.0, 0.0), Error);
  CHECK_THROWS_AS(shoot_left(s, 0.0, -1.0), Error);
}

TEST_CASE("shoot_left mirrors shoot_right") {
  const ShootingSpec s(EpsModel(1e-4), 1.0, 1.0);
  const WaveProfile w = shoot_left(s, 0.0, 1.0);
  CHECK(w.xs.back() == 0.0);
  CHECK(w.ws.back() == 0.0);
  CHECK(w.x_min() <= -3.0);
  CHECK(sup_error(w, -3.0, 0.0, [](double x) { return std::exp(x) - 1.0; }) <= 0.02);

  const ShootingSpec half(EpsModel(1e-2), 0.5, 0.5);
  const WaveProfile h = shoot_left(half, 0.0, 0.5);
  CHECK(h.terminated_reason == Termination::SlopeVanished);
  CHECK(std::fabs(h.x_min() + 0.5 * std::log(3.0)) <= 0.15);
}

TEST_CASE("build_wave") {
  const ShootingSpec sym(EpsModel(1e-2), 1.0, 1.0);
  const WaveProfile w = build_wave(sym);
  CHECK(w.velocity == 0.0);
  for (double x : {0.1, 0.7, 1.5, 3.0}) CHECK(std::fabs(w.at(x) + w.at(-x)) <= 1e-6);
  CHECK(w.at(0.0) == 0.0);

  const ShootingSpec half(EpsModel(1e-2), 0.5, 0.5);
  const WaveProfile hw = build_wave(half);
  CHECK(hw.terminated_reason == Termination::SlopeVanished);
  CHECK(hw.left_terminated_reason == Termination::SlopeVanished);
  const double x_top = 0.5 * std::log(3.0);
  CHECK(hw.x_min() <= -0.9 * x_top);
  CHECK(hw.x_max() >= 0.9 * x_top);
}

TEST_CASE("build_wave approaches the sign-changing steady state") {
  const SteadySpec target(2.0, 1.0);
  auto f = [&](double x) { return w_ab(target, x); };
  std::vector<double> errs;
  for (double eps : {1e-3, 1e-4, 1e-6, 1e-8}) {
    const WaveProfile w = build_wave(ShootingSpec(EpsModel(eps), 2.0, 1.0));
    REQUIRE(w.x_min() <= -1.5);
    REQUIRE(w.x_max() >= 1.5);
    if (eps == 1e-3) CHECK(sup_error(w, 0.0, 1.5, f) <= 0.05);
    errs.push_back(sup_error(w, -1.5, 1.5, f));
  }
  for (std::size_t k = 0; k + 1 < errs.size(); ++k) CHECK(errs[k + 1] < errs[k]);
}

TEST_CASE("phase_shoot") {
  const EpsModel m(1e-4);
  const double w_target = 0.25;
  const auto pts = phase_shoot_at(m, 0.0, 1.0, std::vector<double>{w_target});
  REQUIRE(pts.size() == 1);
  // 1 - e^{-x} = w gives slope e^{-x} = 1 - w.
  CHECK(std::fabs(pts[0].p - (1.0 - w_target)) <= 0.02);

  const auto origin = phase_shoot(m, 0.3, 1.5, 0.0);
  REQUIRE(origin.size() == 1);
  CHECK(origin[0].w == 0.0);
  CHECK(origin[0].p == 1.5);

  const EpsModel m3(1e-3);
  const double c = velocity(m3, 2.0, 1.0);
  const auto at = phase_shoot_at(m3, c, 1.5, std::vector<double>{0.05});
  CHECK(std::fabs(at[0].p - 1.0) <= 0.25);
}

TEST_CASE("q_diagnostic") {
  const EpsModel m(1e-3);
  const auto zero_c = phase_shoot(m, 0.0, 1.0, 0.5);
  const auto q0 = q_diagnostic(m, 0.0, zero_c);
  for (std::size_t k = 0; k < q0.size(); ++k) CHECK(q0[k].q == zero_c[k].p);

  const double c = velocity(m, 2.0, 1.0);
  const auto ph = phase_shoot(m, c, 1.5, 0.05);
  const auto q = q_diagnostic(m, c, ph);
  double worst = 0.0;
  for (const auto& p : q) {
    if (p.w > 0.0 && p.w <= 0.05) worst = std::max(worst, std::fabs(p.q - 1.5));
  }
  CHECK(worst <= 0.2);
  const std::vector<PhasePoint> start{{0.0, 1.5, 0.0}};
  CHECK(q_diagnostic(m, c, start)[0].q == 1.5);
}

TEST_CASE("spatial and phase-plane shooting agree") {
  for (double b : {0.5, 1.0, 2.0}) {
    for (double eps : {1e-2, 1e-4}) {
      const ShootingSpec s(EpsModel(eps), b, b);
      const WaveProfile w = shoot_right(s, 0.0, b);
      std::vector<double> levels;
      for (std::size_t k = 1; k < w.ws.size(); ++k) {
        if (w.ws[k] > w.ws[k - 1] && w.slopes[k] > 1e-3) levels.push_back(w.ws[k]);
      }
      const auto ph = phase_shoot_at(s.model, 0.0, b, levels);
      double worst = 0.0;
      for (const auto& p : ph) {
        if (p.x <= w.x_max()) worst = std::max(worst, std::fabs(w.at(p.x) - p.w) / (s.step_tol * (1.0 + p.x)));
      }
      CAPTURE(b);
      CAPTURE(eps);
      CHECK(worst <= 5.0);
    }
  }
}

TEST_CASE("shot waves converge as eps shrinks") {
  for (double b : {0.5, 2.0}) {
    const SteadySpec target(b, b);
    std::vector<double> errs;
    for (double eps : {1e-2, 1e-3, 1e-4}) {
      const ShootingSpec s(EpsModel(eps), b, b);
      const WaveProfile w = shoot_right(s, 0.0, b);
      double x_end = w.x_max();
      if (b < 1.0) x_end = std::min(x_end, std::atanh(b));
      errs.push_back(sup_error(w, 0.0, 0.9 * x_end, [&](double x) { return w_plus(target, x); }));
    }
    for (std::size_t k = 0; k + 1 < errs.size(); ++k) CHECK(errs[k + 1] <= 1.1 * errs[k]);
    CHECK(errs.back() <= 0.05);
  }
}

TEST_CASE("every profile is pinned at the origin") {
  const WaveProfile w = build_wave(ShootingSpec(EpsModel(1e-3), 2.0, 1.0));
  bool found = false;
  for (std::size_t k = 0; k < w.xs.size(); ++k) {
    if (w.xs[k] == 0.0) {
      found = true;
      CHECK(w.ws[k] == 0.0);
    }
  }
  CHECK(found);
}
