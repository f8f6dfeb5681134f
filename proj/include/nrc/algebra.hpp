#pragma once

#include <Eigen/Dense>

#include <array>
#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace nrc {

using cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using RMatrix = Eigen::MatrixXd;

// Structure constants stored as real kappa with alpha_abc = i * kappa_abc,
// defined through [T_b, T_c] = sum_a alpha_abc T_a.
struct LieAlgebraSpec {
  std::size_t dimension = 0;
  std::vector<double> kappa;  // row-major N x N x N

  double kappa_at(std::size_t a, std::size_t b, std::size_t c) const {
    return kappa[(a * dimension + b) * dimension + c];
  }
  cplx alpha(std::size_t a, std::size_t b, std::size_t c) const { return {0.0, kappa_at(a, b, c)}; }

  // Throws InvalidArgument unless alpha_abc = -alpha_acb.
  void validate() const;
};

LieAlgebraSpec su2_spec();
LieAlgebraSpec su11_spec();

// max |[T_b, T_c] - sum_a alpha_abc T_a| over the given representation.
double structure_residual(const LieAlgebraSpec& spec, std::span<const CMatrix> generators);

// G_ab = (1/i) sum_c alpha_abc f_c.
RMatrix build_coupling_matrix(const LieAlgebraSpec& spec, std::span<const double> f);

// Pauli matrices.
Eigen::Matrix2cd sigma_x();
Eigen::Matrix2cd sigma_y();
Eigen::Matrix2cd sigma_z();

Eigen::Matrix2cd su2_invariant_matrix(double G, double B, double omega_r);

// H = delta/2 sigma_z + omega/2 sigma_x
Eigen::Matrix2cd tls_hamiltonian(double delta, double omega);

struct TlsControls {
  double delta = 0.0;
  double omega = 0.0;
};

// Delta = -B' + G' / (tan G tan B), Omega = G' / sin B.  A vanishing
// denominator is accepted only together with G' = 0.
TlsControls su2_controls_from_angles(double G, double G_dot, double B, double B_dot);

// Invariant components for I = sum_a f_a sigma_a with the angle form
// f = omega_r (sin G cos B, -sin G sin B, cos G); f_dot is its time derivative.
struct Su2Components {
  std::array<double, 3> f{};
  std::array<double, 3> f_dot{};
};
Su2Components su2_components_from_angles(double G, double G_dot, double B, double B_dot,
                                         double omega_r);

// Delta = -f1'/f2, Omega = f3'/f2.  The sphere constraint sum f_i f_i' = 0 is
// checked relative to |f| |f'| with the given tolerance.
TlsControls su2_controls_from_components(const std::array<double, 3>& f,
                                         const std::array<double, 3>& f_dot,
                                         double tolerance = 1e-9);

// omega^2 = omega0^2 / rho^4 - rho_ddot / rho.  Negative values (inverted
// trap) are returned unchanged.
double omega_from_rho(double rho, double rho_ddot, double omega0);

// ||[H, I]||_F / (||H||_F ||I||_F)
double frictionless_residual(const CMatrix& H, const CMatrix& I);

}  // namespace nrc
