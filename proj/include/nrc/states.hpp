#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstddef>

#include "nrc/algebra.hpp"

namespace nrc {

// Single-mode Gaussian record: first moments and symmetrized covariances.
struct GaussianMoments {
  double q = 0.0;
  double p = 0.0;
  double vqq = 0.0;
  double vpp = 0.0;
  double vqp = 0.0;

  double q2() const noexcept { return vqq + q * q; }
  double p2() const noexcept { return vpp + p * p; }
  double qp_sym() const noexcept { return vqp + q * p; }
  double uncertainty() const noexcept { return vqq * vpp - vqp * vqp; }
};

// Throws InvalidCovariance unless V_qq, V_pp > 0 and det V >= 1/4 - tol.
void validate_moments(const GaussianMoments& m, double tol = 1e-9);

// Throws InvalidArgument unless rho is square, Hermitian (1e-12 relative),
// trace one (1e-9) and has no eigenvalue below -1e-8.
void validate_density(const CMatrix& rho);

// sqrt of a Hermitian positive semidefinite matrix.  Eigenvalues in
// (-clamp, 0) are set to zero; more negative ones raise NonPSDInput.
CMatrix hermitian_sqrt(const CMatrix& a, double clamp = 1e-10);

// F = tr sqrt(sqrt(rho) sigma sqrt(rho)).
double uhlmann_fidelity(const CMatrix& rho, const CMatrix& sigma);

// Single-mode Gaussian fidelity in the same tr sqrt(...) convention.
double gaussian_fidelity(const GaussianMoments& a, const GaussianMoments& b);

GaussianMoments thermal_moments(double nbar, double omega, double mass);
GaussianMoments coherent_moments(std::complex<double> alpha, double omega, double mass);

// Fock-basis forms in the basis of an oscillator of frequency omega.
CMatrix thermal_fock(double nbar, std::size_t d);
Eigen::VectorXcd coherent_fock(std::complex<double> alpha, std::size_t d);

// Density matrix of an arbitrary Gaussian state in the Fock basis of
// (mass, omega_ref), truncated to d levels.  Built as the thermal state of the
// quadratic form (x - mean)^T W^{-1} (x - mean) / 2 with V = sqrt(det V) W,
// diagonalized in an enlarged basis of `pad` * d levels.
CMatrix gaussian_to_fock(const GaussianMoments& m, double mass, double omega_ref, std::size_t d,
                         std::size_t pad = 4);

// First and second moments of a density matrix given q and p operators.
GaussianMoments moments_from_density(const CMatrix& rho, const CMatrix& q, const CMatrix& p);

// Coherent target after an expansion with phase integral g:
// alpha_tilde = alpha exp(-i g omega0), expressed at the final frequency.
struct CoherentTarget {
  std::complex<double> alpha_tilde;
  double global_phase = 0.0;  // -g omega0 / 2, carried as metadata
  GaussianMoments moments;
};
CoherentTarget target_coherent(std::complex<double> alpha, double g, double omega0, double omega_f,
                               double mass);

}  // namespace nrc
