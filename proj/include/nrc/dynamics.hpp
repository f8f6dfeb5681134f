#pragma once

#include <Eigen/Dense>

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "nrc/algebra.hpp"
#include "nrc/ode.hpp"
#include "nrc/protocols.hpp"
#include "nrc/states.hpp"

namespace nrc {

enum class NoiseOperator { sigma_z, sigma_x, q, q_squared };

std::string to_string(NoiseOperator op);
NoiseOperator noise_operator_from_string(const std::string& s);
bool is_pauli(NoiseOperator op);

// eta in internal units: per time unit for Pauli channels, per time unit per
// length^2 (q) or length^4 (q^2) for oscillator channels.
struct NoiseChannel {
  NoiseOperator op = NoiseOperator::sigma_z;
  double eta = 0.0;
};

// Explicit Hermitian noise operator with its strength.
struct DenseChannel {
  CMatrix X;
  double eta = 0.0;
};

// Pauli channels only; throws UnsupportedChannel for oscillator tags.
std::vector<DenseChannel> pauli_channels(std::span<const NoiseChannel> channels);

// -i[H, rho] - sum_k eta_k [X_k, [X_k, rho]]
CMatrix lindblad_rhs(const CMatrix& rho, const CMatrix& H, std::span<const DenseChannel> channels);

struct MasterResult {
  std::vector<double> times;
  std::vector<CMatrix> states;  // one per requested sample time
  CMatrix final_state;
  double max_trace_drift = 0.0;
  OdeStats stats;
};

// Integrate the master equation from t = 0, sampling at `times` (ascending,
// last entry = final time).  rho is symmetrized after every accepted step.
MasterResult integrate_master(const CMatrix& rho0, const std::function<CMatrix(double)>& H,
                              std::span<const DenseChannel> channels,
                              std::span<const double> times, const OdeOptions& opt = {});

// Noisy two-level run of a protocol from |0><0|; returns the final state.
MasterResult simulate_tls(const TlsProtocol& p, std::span<const NoiseChannel> channels,
                          const OdeOptions& opt = {}, std::size_t samples = 2);

// Time derivative of the Gaussian record (fields hold d/dt of each entry).
GaussianMoments gaussian_moment_rhs(const GaussianMoments& m, double omega2, double mass,
                                    std::span<const NoiseChannel> channels);

struct MomentTrajectory {
  std::vector<double> times;
  std::vector<GaussianMoments> moments;
  GaussianMoments final_moments;
  OdeStats stats;
};

MomentTrajectory integrate_moments(const GaussianMoments& m0, const TrapSchedule& trap,
                                   std::span<const NoiseChannel> channels,
                                   std::span<const double> times, const OdeOptions& opt = {});

// Eigen-decomposition of an invariant with an optional noise-operator
// spectrum.
struct InvariantSpectrum {
  Eigen::VectorXd lambda;
  CMatrix vectors;  // orthonormal columns
};

InvariantSpectrum invariant_spectrum(const CMatrix& I);

// lambda_dot_l = 2 eta (lambda_l <l|X^2|l> - sum_k lambda_k |<k|X|l>|^2)
Eigen::VectorXd lambda_dot(const InvariantSpectrum& spec, const CMatrix& X, double eta);

// Dissipative part of d rho / dt expressed in the invariant basis; rho is
// given in that basis, X in the computational basis.
CMatrix dissipative_matrix_elements(const CMatrix& rho_inv_basis, const InvariantSpectrum& spec,
                                    const CMatrix& X, double eta);

}  // namespace nrc
