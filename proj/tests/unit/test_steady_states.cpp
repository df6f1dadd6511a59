#include <doctest.h>

#include <cmath>
#include <vector>

#include "fbsim/error.hpp"
#include "fbsim/steady_states.hpp"

using namespace fbsim;

namespace {

std::vector<double> sample(const SteadySpec& s, double a, double b, double h) {
  const int n = static_cast<int>(std::lround((b - a) / h));
  std::vector<double> out(n + 1);
  for (int j = 0; j <= n; ++j) out[j] = w_ab(s, a + j * h);
  return out;
}

double max_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::fabs(x));
  return m;
}

}  // namespace

TEST_CASE("SteadySpec validation and supports") {
  CHECK_THROWS_AS(SteadySpec(0.0, 1.0), Error);
  CHECK_THROWS_AS(SteadySpec(1.0, -1.0), Error);
  CHECK(SteadySpec(1.0, 0.5).support_right() == doctest::Approx(std::log(3.0)));
  CHECK(std::isinf(SteadySpec(1.0, 1.0).support_right()));
  CHECK(SteadySpec(0.5, 1.0).support_left() == doctest::Approx(-std::log(3.0)));
  CHECK(std::isinf(SteadySpec(2.0, 1.0).support_left()));
}

TEST_CASE("w_plus") {
  const SteadySpec s(1.0, 0.5);
  CHECK(w_plus(s, 0.0) == 0.0);
  CHECK(std::fabs(w_plus(s, std::log(3.0))) <= 1e-15);
  CHECK(w_plus(SteadySpec(1.0, 1.0), 2.0) == doctest::Approx(1.0 - std::exp(-2.0)));
  CHECK_THROWS_AS(w_plus(s, -0.1), Error);
  CHECK(w_plus_derivative(s, 0.0) == doctest::Approx(0.5));
  for (int k = 1; k < 200; ++k) {
    const double x = 3.0 * k / 200.0;
    CHECK((w_plus(s, x) > 0.0) == (x < std::log(3.0)));
    CHECK(w_plus(SteadySpec(1.0, 2.0), x) > 0.0);
  }
}

TEST_CASE("w_minus") {
  CHECK(w_minus(SteadySpec(2.0, 1.0), 0.0) == 0.0);
  CHECK(std::fabs(w_minus(SteadySpec(0.5, 1.0), -std::log(3.0))) <= 1e-15);
  CHECK(w_minus(SteadySpec(1.0, 1.0), -1.0) == doctest::Approx(std::exp(-1.0) - 1.0));
  CHECK(w_minus(SteadySpec(1.0, 1.0), -1.0) == doctest::Approx(-0.6321).epsilon(1e-4));
  CHECK_THROWS_AS(w_minus(SteadySpec(1.0, 1.0), 0.1), Error);
  CHECK(w_minus_derivative(SteadySpec(2.0, 1.0), 0.0) == doctest::Approx(2.0));
}

TEST_CASE("w_ab") {
  CHECK(w_ab(SteadySpec(2.0, 1.0), 0.0) == 0.0);
  const SteadySpec sym(1.0, 1.0);
  for (double x : {-2.5, -0.3, 0.4, 1.7}) {
    CHECK(w_ab(sym, x) == doctest::Approx(std::copysign(1.0 - std::exp(-std::fabs(x)), x)));
  }
  CHECK(w_ab(SteadySpec(2.0, 0.5), -1.0) == doctest::Approx(-1.8073).epsilon(1e-4));
}

TEST_CASE("one-sided difference quotients recover the slopes at first order") {
  for (double a : {0.5, 1.0, 2.0}) {
    for (double b : {0.5, 1.0, 2.0}) {
      const SteadySpec s(a, b);
      double prev_l = 0.0, prev_r = 0.0;
      for (double h : {1e-2, 5e-3, 2.5e-3}) {
        const double el = std::fabs((0.0 - w_ab(s, -h)) / h - a);
        const double er = std::fabs(w_ab(s, h) / h - b);
        CHECK(el <= 2.0 * h);
        CHECK(er <= 2.0 * h);
        if (prev_l > 0.0) {
          CHECK(prev_l / el == doctest::Approx(2.0).epsilon(0.05));
          CHECK(prev_r / er == doctest::Approx(2.0).epsilon(0.05));
        }
        prev_l = el;
        prev_r = er;
      }
    }
  }
}

TEST_CASE("inflection") {
  const auto i125 = inflection(SteadySpec(1.25, 1.0));
  CHECK(i125.x_star == doctest::Approx(-std::log(3.0)));
  CHECK(i125.min_slope == doctest::Approx(0.75));
  const double r2 = std::sqrt(2.0);
  const auto i2 = inflection(SteadySpec(r2, 1.0));
  CHECK(i2.x_star == doctest::Approx(-0.5 * std::log((r2 + 1) / (r2 - 1))));
  CHECK(i2.min_slope == doctest::Approx(1.0));
  CHECK_THROWS_AS(inflection(SteadySpec(1.0, 1.0)), Error);
  CHECK_THROWS_AS(inflection(SteadySpec(0.5, 1.0)), Error);
  const auto near = inflection(SteadySpec(1.0 + 1e-9, 1.0));
  CHECK(near.min_slope < 1e-4);
  CHECK(near.x_star < -9.0);

  for (double a : {1.25, r2, 2.0}) {
    const SteadySpec s(a, 1.0);
    const auto inf = inflection(s);
    double min_slope = INFINITY;
    for (int k = 0; k <= 200000; ++k) {
      const double x = -6.0 + 6.0 * k / 200000.0;
      min_slope = std::min(min_slope, w_minus_derivative(s, x));
    }
    CHECK(std::fabs(std::min(min_slope, w_minus_derivative(s, inf.x_star)) - std::sqrt(a * a - 1.0)) <= 1e-9);
    CHECK(std::fabs(w_minus_derivative(s, inf.x_star) - std::sqrt(a * a - 1.0)) <= 1e-9);
  }
}

TEST_CASE("residual_limit_equation") {
  const auto r = residual_limit_equation(sample(SteadySpec(2.0, 1.0), -2.0, 2.0, 1e-3), 1e-3);
  CHECK(max_abs(r) <= 1e-5);
  CHECK(max_abs(residual_limit_equation(std::vector<double>(50, 0.0), 0.1)) == 0.0);
  CHECK(max_abs(residual_limit_equation(std::vector<double>(50, 1.0), 0.1)) == 0.0);
  CHECK_THROWS_AS(residual_limit_equation(std::vector<double>{1.0, 1.0}, 0.1), Error);
}

TEST_CASE("residual converges at second order for every slope pair") {
  for (double a : {0.5, 1.0, 2.0}) {
    for (double b : {0.5, 1.0, 2.0}) {
      const SteadySpec s(a, b);
      std::vector<double> errs;
      for (double h : {1e-2, 5e-3, 2.5e-3}) {
        errs.push_back(max_abs(residual_limit_equation(sample(s, -1.0, 1.0, h), h)));
      }
      for (std::size_t k = 0; k + 1 < errs.size(); ++k) {
        CAPTURE(a);
        CAPTURE(b);
        CHECK(std::log2(errs[k] / errs[k + 1]) >= 1.9);
      }
    }
  }
}
