#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "fbsim/core_transform.hpp"
#include "fbsim/error.hpp"
#include "oracles.hpp"

using namespace fbsim;

namespace {

double u_quadrature(double eps, double phi) {
  return 2.0 * oracle::integrate([eps](double s) { return std::sqrt(eps + s * s); }, 0.0, phi);
}

double a_quadrature(const EpsModel& m, double u) {
  const double eps = m.eps();
  auto f = [&](double s) {
    const double p = m.phi_from_u(s);
    return 1.0 / (eps + p * p);
  };
  return oracle::integrate(f, 0.0, u, oracle::geometric_breaks(eps, u));
}

}  // namespace

TEST_CASE("EpsModel rejects eps outside (0, 1]") {
  CHECK_THROWS_AS(EpsModel(0.0), Error);
  CHECK_THROWS_AS(EpsModel(-1e-3), Error);
  CHECK_THROWS_AS(EpsModel(1.5), Error);
  CHECK_NOTHROW(EpsModel(1.0));
}

TEST_CASE("u_from_phi values") {
  const EpsModel m(0.01);
  CHECK(m.u_from_phi(0.0) == 0.0);
  CHECK(m.u_from_phi(1.0) == doctest::Approx(u_quadrature(0.01, 1.0)).epsilon(1e-12));
  CHECK(m.u_from_phi(1.0) == doctest::Approx(1.0350).epsilon(1e-4));
  for (double eps : {1.0, 1e-2, 1e-5, 1e-10}) {
    const EpsModel e(eps);
    const double expected = (std::numbers::sqrt2 + std::log(1.0 + std::numbers::sqrt2)) * eps;
    CHECK(std::fabs(e.u_from_phi(std::sqrt(eps)) / expected - 1.0) <= 1e-12);
    for (double phi : {1e-7, 1e-3, 0.3, 2.5}) {
      CHECK(e.u_from_phi(phi) == doctest::Approx(u_quadrature(eps, phi)).epsilon(1e-11));
    }
  }
}

TEST_CASE("u_from_phi is odd and strictly increasing") {
  for (double eps : {1.0, 1e-2, 1e-4, 1e-8}) {
    const EpsModel m(eps);
    double prev = -INFINITY;
    for (int k = 0; k <= 6000; ++k) {
      const double phi = -3.0 + 6.0 * k / 6000.0;
      const double u = m.u_from_phi(phi);
      CHECK(u > prev);
      prev = u;
      CHECK(m.u_from_phi(-phi) == -u);
    }
  }
}

TEST_CASE("u_from_phi approaches |phi| phi as eps vanishes") {
  const EpsModel m(1e-10);
  for (int k = 0; k <= 400; ++k) {
    const double phi = -2.0 + 4.0 * k / 400.0;
    CHECK(std::fabs(m.u_from_phi(phi) - std::fabs(phi) * phi) <= 1e-4);
  }
}

TEST_CASE("phi_from_u inverts u_from_phi") {
  const EpsModel m(0.01);
  CHECK(m.phi_from_u(0.0) == 0.0);
  CHECK(m.phi_from_u(m.u1()) == doctest::Approx(1.0).epsilon(1e-12));

  const EpsModel tiny(1e-6);
  const double phi = tiny.phi_from_u(0.25);
  const double bis = oracle::bisect([&](double p) { return tiny.u_from_phi(p); }, 0.25, 0.0, 2.0);
  CHECK(std::fabs(phi - bis) <= 1e-12);
  CHECK(std::fabs(phi - 0.5) <= 2e-3);

  for (double eps : {1.0, 1e-2, 1e-4, 1e-8}) {
    const EpsModel e(eps);
    double worst = 0.0;
    for (int k = 0; k < 1000; ++k) {
      const double p = -3.0 + 6.0 * (k + 0.5) / 1000.0;
      worst = std::max(worst, std::fabs(e.phi_from_u(e.u_from_phi(p)) - p) / (1.0 + std::fabs(p)));
    }
    CHECK(worst <= 1e-9);
  }
}

TEST_CASE("phi_from_u converges on the documented range") {
  for (double eps : {1.0, 1e-4, 1e-10}) {
    const EpsModel m(eps);
    for (int k = -100; k <= 100; ++k) {
      const double u = 0.1 * k;
      double phi = 0.0;
      CHECK_NOTHROW(phi = m.phi_from_u(u));
      CHECK(std::fabs(m.u_from_phi(phi) - u) <= m.newton_tol() * (1.0 + std::fabs(u)) * 10.0);
      CHECK(m.phi_from_u(-u) == -phi);
    }
  }
}

TEST_CASE("diffusivity and reaction") {
  CHECK(EpsModel(0.04).diffusivity(0.0) == doctest::Approx(0.04));
  const EpsModel m(0.01);
  CHECK(m.diffusivity(m.u1()) == doctest::Approx(1.01).epsilon(1e-12));
  CHECK(m.reaction(0.0) == 0.0);
  CHECK(std::fabs(m.reaction(m.u1())) <= 1e-12);
  CHECK(std::fabs(m.reaction(-m.u1())) <= 1e-12);

  const EpsModel tiny(1e-8);
  const double phi_bis = oracle::bisect([&](double p) { return tiny.u_from_phi(p); }, 0.09, 0.0, 2.0);
  CHECK(tiny.diffusivity(0.09) == doctest::Approx(1e-8 + phi_bis * phi_bis).epsilon(1e-10));
  CHECK(tiny.diffusivity(0.09) == doctest::Approx(0.09).epsilon(1e-4));
  CHECK(tiny.reaction(0.25) == doctest::Approx(0.1875).epsilon(1e-4));
  CHECK(tiny.reaction(-0.25) == -tiny.reaction(0.25));
  for (double u : {0.1, 0.5, 1.0}) CHECK(tiny.diffusivity(u) >= 1e-8);
}

TEST_CASE("a_transform closed form vs quadrature") {
  for (double eps : {1e-2, 1e-4}) {
    const EpsModel m(eps);
    CHECK(m.a_transform(0.0) == 0.0);
    for (double u : {1e-6, 1e-3, 0.05, 0.5, 1.0, 2.0}) {
      CHECK(std::fabs(m.a_transform(u) - a_quadrature(m, u)) <= 1e-8);
      CHECK(m.a_transform(-u) == -m.a_transform(u));
    }
  }
  for (double eps : {1.0, 1e-3, 1e-9}) {
    const EpsModel m(eps);
    CHECK(m.a_transform(m.u_from_phi(std::sqrt(eps))) ==
          doctest::Approx(2.0 * std::log(1.0 + std::numbers::sqrt2)).epsilon(1e-9));
  }
}

TEST_CASE("a_transform ratio at delta = 1/log(1/eps)") {
  const double eps = 1e-8;
  const EpsModel m(eps);
  const double delta = 1.0 / std::log(1.0 / eps);
  CHECK(m.a_transform(delta) / -std::log(eps) == doctest::Approx(0.92).epsilon(0.01));
}

TEST_CASE("rescale_physical maps the physical equation onto the dimensionless one") {
  const auto r = rescale_physical({0.01, 1.0}, 1.0 / std::numbers::sqrt2, 0.5);
  CHECK(r.eps == doctest::Approx(0.01));
  CHECK(r.x == doctest::Approx(1.0));
  CHECK(r.t == doctest::Approx(1.0));
  const auto o = rescale_physical({1.0, 1.0}, 0.0, 0.0);
  CHECK(o.eps == 1.0);
  CHECK(o.x == 0.0);
  CHECK(o.t == 0.0);
  const auto q = rescale_physical({0.02, 2.0}, 1.0, 4.0);
  CHECK(q.eps == doctest::Approx(0.01));
  CHECK(q.x == doctest::Approx(1.0));
  CHECK(q.t == doctest::Approx(8.0));
  const auto back = to_physical({0.02, 2.0}, q.x, q.t);
  CHECK(back.x == doctest::Approx(1.0));
  CHECK(back.t == doctest::Approx(4.0));
  CHECK_THROWS_AS(rescale_physical({0.0, 1.0}, 0.0, 0.0), Error);
}

TEST_CASE("rescale_physical: PDE residual oracle") {
  // Any smooth field phi(x, t) pulled back to physical variables must have
  // physical residual exactly twice its dimensionless residual.
  const PhysicalParams p{0.03, 1.7};
  const double eps = p.eps();
  auto phi = [](double x, double t) { return std::tanh(0.7 * x - 0.4 * t) + 0.2 * std::sin(x + t); };
  auto phys = [&](double xp, double tp) {
    const auto r = rescale_physical(p, xp, tp);
    return phi(r.x, r.t);
  };
  const double h = 1e-4;
  for (double xp : {-0.8, 0.1, 0.9}) {
    for (double tp : {0.2, 0.7}) {
      const auto r = rescale_physical(p, xp, tp);
      const double x = r.x, t = r.t;
      const double f = phi(x, t);
      const double ft = (phi(x, t + h) - phi(x, t - h)) / (2 * h);
      const double fx = (phi(x + h, t) - phi(x - h, t)) / (2 * h);
      const double fxx = (phi(x + h, t) - 2 * f + phi(x - h, t)) / (h * h);
      const double dimless = ft - (eps + f * f) * fxx - f * fx * fx - 0.5 * f * (1 - f * f);

      const double g = phys(xp, tp);
      const double gt = (phys(xp, tp + h) - phys(xp, tp - h)) / (2 * h);
      auto flux = [&](double y) {
        const double v = phys(y, tp);
        const double vx = (phys(y + h, tp) - phys(y - h, tp)) / (2 * h);
        return (p.d0 + p.d2 * v * v) * vx;
      };
      const double gx = (phys(xp + h, tp) - phys(xp - h, tp)) / (2 * h);
      const double div = (flux(xp + h) - flux(xp - h)) / (2 * h);
      const double physical = gt - div + p.d2 * g * gx * gx - g * (1 - g * g);
      CHECK(physical == doctest::Approx(2.0 * dimless).epsilon(1e-4).scale(1.0));
    }
  }
}

TEST_CASE("energy functional") {
  const PhysicalParams p{1.0, 1.0};
  const int n = 1000;
  const double h = 1.0 / n;
  std::vector<double> one(n + 1, 1.0), zero(n + 1, 0.0), lin(n + 1);
  for (int j = 0; j <= n; ++j) lin[j] = j * h;
  CHECK(energy(p, one, h) == doctest::Approx(-0.25).epsilon(1e-12));
  CHECK(energy(p, zero, h) == 0.0);
  const double exact = -1.0 / 6.0 + 1.0 / 20.0 + 0.5 + 1.0 / 6.0;
  CHECK(energy(p, lin, h) == doctest::Approx(exact).epsilon(1e-5));
  CHECK_THROWS_AS(energy(p, std::vector<double>{1.0, 2.0}, h), Error);
}
