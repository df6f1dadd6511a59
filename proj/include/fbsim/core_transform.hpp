#pragma once

#include <span>

namespace fbsim {

/// Regularisation parameter eps together with the closed-form maps built on
/// it: U_eps(phi) = 2 * int_0^phi sqrt(eps + s^2) ds, its inverse Phi_eps, the
/// coefficients of the transformed equation
///   u_t = (eps + Phi^2(u)) u_xx + Phi(u) (1 - Phi^2(u)) sqrt(eps + Phi^2(u)),
/// and the log-transform A_eps(u) = int_0^u ds / (eps + Phi^2(s)).
///
/// Immutable after construction; safe to share between threads.
class EpsModel {
 public:
  static constexpr double kDefaultNewtonTol = 1e-12;
  static constexpr int kDefaultNewtonMaxIter = 100;

  explicit EpsModel(double eps, double newton_tol = kDefaultNewtonTol,
                    int newton_max_iter = kDefaultNewtonMaxIter);

  double eps() const noexcept { return eps_; }
  double sqrt_eps() const noexcept { return sqrt_eps_; }
  double newton_tol() const noexcept { return newton_tol_; }
  int newton_max_iter() const noexcept { return newton_max_iter_; }

  /// U_eps(phi); odd and strictly increasing.
  double u_from_phi(double phi) const noexcept;

  /// Phi_eps(u) by safeguarded Newton started at sgn(u) sqrt(|u|).
  double phi_from_u(double u) const;

  /// Same inversion warm-started at `guess` (clamped into the bracket).
  double phi_from_u(double u, double guess) const;

  /// eps + Phi^2(u).
  double diffusivity(double u) const;

  /// Phi (1 - Phi^2) sqrt(eps + Phi^2).
  double reaction(double u) const;

  /// 2 asinh(Phi(u) / sqrt(eps)), the closed form of A_eps.
  double a_transform(double u) const;

  /// u_{1eps} = U_eps(1), the bulk-phase value with Phi(u_{1eps}) = 1.
  double u1() const noexcept { return u1_; }

  struct Coefficients {
    double phi;
    double diffusivity;
    double reaction;
  };

  /// All coefficients at u in one inversion; `phi_guess` warm-starts Newton.
  Coefficients coefficients(double u, double phi_guess) const;

 private:
  double invert_abs(double a, double guess) const;

  double eps_;
  double sqrt_eps_;
  double newton_tol_;
  int newton_max_iter_;
  double u1_;
};

struct PhysicalParams {
  double d0;
  double d2;

  double eps() const noexcept { return d0 / d2; }
};

struct RescaledPoint {
  double eps;
  double x;
  double t;
};

/// Maps (x, t) of phi_t = ((D0 + D2 phi^2) phi_x)_x - D2 phi phi_x^2 + phi (1 - phi^2)
/// onto the dimensionless variables of phi_t = (eps + phi^2) phi_xx + phi phi_x^2 + phi (1 - phi^2) / 2.
RescaledPoint rescale_physical(const PhysicalParams& p, double x_phys, double t_phys);

/// Inverse of rescale_physical for the space and time coordinates.
RescaledPoint to_physical(const PhysicalParams& p, double x, double t);

/// Trapezoidal value of F[phi] = int (V(phi) + D(phi) phi'^2 / 2) dx with the
/// double well V = -phi^2/2 + phi^4/4 and D = D0 + D2 phi^2.
double energy(const PhysicalParams& p, std::span<const double> phi, double grid_spacing);

}  // namespace fbsim
