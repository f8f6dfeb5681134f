#pragma once

#include <Eigen/Dense>

#include <array>
#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "nrc/algebra.hpp"
#include "nrc/polynomial.hpp"
#include "nrc/units.hpp"

namespace nrc {

inline constexpr std::size_t default_grid_points = 2001;

// All protocol polynomials are expressed in the normalized time s = t / t_f,
// so a free coefficient c_i of s^i corresponds to c_i / t_f^i in physical time.

// ---------------------------------------------------------------- two-level

// B(s): cubic through B(0), B(1), B'(0), B'(1) plus free coefficients of
// degrees 4, 5, ...  Unset slopes are derived from the boundary detuning so
// that Delta(0) = Delta0 and Delta(t_f) = -Delta0.
struct BSpec {
  double b0 = units::pi / 2;
  double bf = units::pi / 2;
  std::optional<double> b_dot0;  // physical rate (rad per time unit)
  std::optional<double> b_dotf;
  std::vector<double> extra;
};

class TlsProtocol {
 public:
  TlsProtocol(double delta0, double t_f, BoundaryPolynomial G, BoundaryPolynomial B);

  double t_f() const noexcept { return t_f_; }
  double delta0() const noexcept { return delta0_; }
  double omega_r() const noexcept { return omega_r_; }
  const BoundaryPolynomial& G_poly() const noexcept { return G_; }
  const BoundaryPolynomial& B_poly() const noexcept { return B_; }

  double G(double t) const;
  double G_dot(double t) const;
  double B(double t) const;
  double B_dot(double t) const;

  // Controls with the removable boundary limits resolved.
  TlsControls controls(double t) const;

  Eigen::Matrix2cd invariant(double t) const;
  Eigen::Matrix2cd hamiltonian(double t) const;

 private:
  TlsControls controls_interior(double s) const;

  double delta0_;
  // Taylor expansions about s = 0 and s = 1 for cancellation-free increments.
  Polynomial G_at0_, G_at1_, B_at0_, B_at1_;
  double t_f_;
  double omega_r_;
  BoundaryPolynomial G_;
  BoundaryPolynomial B_;
};

// G(s) = cubic through G(0)=pi, G(1)=0, G'(0)=G'(1)=0 plus g_extra as the
// coefficients of s^4, s^5, ...
BoundaryPolynomial make_tls_G(std::span<const double> g_extra);

TlsProtocol make_tls_protocol(double delta0, double t_f, std::span<const double> g_extra,
                              const BSpec& b_spec = {}, std::size_t grid = default_grid_points);

// ---------------------------------------------------------------- oscillator

enum class RhoForm { inverse_sqrt_poly, sqrt_poly };

std::string to_string(RhoForm f);
RhoForm rho_form_from_string(const std::string& s);

struct HoFamily {
  double omega0 = 0.0;
  double omega_f = 0.0;
  double mass = units::default_ion_mass;
  double t_f = 0.0;
  RhoForm form = RhoForm::inverse_sqrt_poly;
  std::size_t grid = default_grid_points;
};

// rho = P^{-1/2} or P^{1/2}, P a polynomial in s satisfying the six
// Ermakov boundary conditions; r_extra are the coefficients of s^6, s^7, ...
class HoProtocol {
 public:
  HoProtocol(const HoFamily& family, BoundaryPolynomial P);

  const HoFamily& family() const noexcept { return family_; }
  double t_f() const noexcept { return family_.t_f; }
  double omega0() const noexcept { return family_.omega0; }
  double omega_f() const noexcept { return family_.omega_f; }
  double mass() const noexcept { return family_.mass; }
  const BoundaryPolynomial& P() const noexcept { return P_; }
  std::vector<double> free_coefficients() const;

  double rho(double t) const;
  double rho_dot(double t) const;
  double rho_ddot(double t) const;
  double rho_dddot(double t) const;

  double omega2(double t) const;
  double omega2_dot(double t) const;

  // |rho'' + omega^2 rho - omega0^2 / rho^3|
  double ermakov_residual(double t) const;

  // Phase integral g = int dt / rho^2 (composite Simpson on the grid).
  double g() const noexcept { return g_; }
  bool inverted_trap() const noexcept { return inverted_; }
  double min_rho() const noexcept { return min_rho_; }

 private:
  // rho^(k) in s-derivatives for k = 0..3
  std::array<double, 4> rho_s(double s) const;

  HoFamily family_;
  BoundaryPolynomial P_;
  double g_ = 0.0;
  bool inverted_ = false;
  double min_rho_ = 0.0;
};

HoProtocol make_ho_protocol(const HoFamily& family, std::span<const double> r_extra);

struct RootOptions {
  double initial_step = 1.0;
  double max_abs = 1e6;
  double rel_tol = 1e-9;  // bisection stops below rel_tol * g_target
  int max_iter = 200;
};

// Solve for the coefficient following `fixed_extra` (r7 when fixed_extra = {r6})
// so that g = g_target.
HoProtocol constrain_g_phase(const HoFamily& family, double g_target,
                             std::span<const double> fixed_extra, const RootOptions& opt = {});

class ConstantMuProtocol {
 public:
  ConstantMuProtocol(double omega0, double omega_f, double t_f);

  double mu() const noexcept { return mu_; }
  double t_f() const noexcept { return t_f_; }
  double omega0() const noexcept { return omega0_; }
  double omega_f() const noexcept { return omega_f_; }

  double omega(double t) const;
  double omega_dot(double t) const;
  double omega2(double t) const { const double w = omega(t); return w * w; }
  double omega2_dot(double t) const { return 2.0 * omega(t) * omega_dot(t); }

 private:
  double omega0_, omega_f_, t_f_, mu_;
};

ConstantMuProtocol make_constant_mu_protocol(double omega0, double omega_f, double t_f);

// Uniform description of a trap-frequency control for the oscillator solvers.
struct TrapSchedule {
  double t_f = 0.0;
  double omega0 = 0.0;
  double omega_f = 0.0;
  double mass = 0.0;
  std::function<double(double)> omega2;
  std::function<double(double)> omega2_dot;
};

TrapSchedule trap_schedule(const HoProtocol& p);
TrapSchedule trap_schedule(const ConstantMuProtocol& p, double mass);
TrapSchedule constant_trap(double omega, double mass, double t_f);

}  // namespace nrc
