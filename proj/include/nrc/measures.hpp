#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "nrc/algebra.hpp"
#include "nrc/protocols.hpp"

namespace nrc {

// Upper bound of the overlap excess sum|S_ij| - n: 2 sqrt 2 - 2 for n = 2,
// the loose n^2 - n otherwise.
double overlap_bound(std::size_t n);

struct MeasureReport {
  std::vector<double> O;  // per channel
  std::vector<double> A;
  double O_bar = 0.0;
  double A_bar = 0.0;
  std::size_t n = 0;
  double O_max = 0.0;
};

// S_ij = <phi_i|psi_j> for orthonormal columns.
CMatrix overlap_matrix(const CMatrix& I_vectors, const CMatrix& X_vectors);

double overlap_excess(const CMatrix& I_vectors, const CMatrix& X_vectors);

// Orthonormal eigenvectors of a Hermitian matrix.  With `previous`, each
// column is rephased to maximize its overlap with the previous sample.
CMatrix eigenvectors(const CMatrix& A, const CMatrix* previous = nullptr);

// O = (1/t_f) int (sum|S_ij| - n) dt over a uniform grid (Simpson).
// Throws DegenerateSpectrum if the invariant becomes degenerate.
double measure_O(const std::function<CMatrix(double)>& invariant, const CMatrix& X, double t_f,
                 std::size_t grid = default_grid_points);

// A = int ||[X, I]|| dt / (2 int ||X I|| dt), Frobenius norms.
double measure_A(const std::function<CMatrix(double)>& invariant, const CMatrix& X, double t_f,
                 std::size_t grid = default_grid_points);

// Closed forms for the two-level invariant; G and B are functions of t.
double closed_form_O_z(const std::function<double(double)>& G, double t_f,
                       std::size_t grid = default_grid_points);
double closed_form_A_z(const std::function<double(double)>& G, double t_f,
                       std::size_t grid = default_grid_points);
double closed_form_O_x(const std::function<double(double)>& G, const std::function<double(double)>& B,
                       double t_f, std::size_t grid = default_grid_points);

// sum_j (eta_j / sum eta) measure_j
double weighted_average(std::span<const double> measures, std::span<const double> strengths);

// Two-level report for sigma_z / sigma_x channels with closed-form O and A.
MeasureReport tls_measures(const TlsProtocol& p, double eta_z, double eta_x,
                           std::size_t grid = default_grid_points);

// int exp(-y^2/2) |H_n(y)| dy over the real line.
double hermite_abs_integral(unsigned n);

// S_n = (1/t_f) int dt int dq |<q|phi_n(t)>| via the separated form.
double ho_overlap_Sn(const std::function<double(double)>& rho, unsigned n, double mass, double omega0,
                     double t_f, std::size_t grid = default_grid_points);
double ho_overlap_Sn(const HoProtocol& p, unsigned n);

// P = (1/t_f) int m w w' <q^2> dt = (1/t_f) int (m/2) d(w^2)/dt <q^2> dt, sign kept.
double average_power(std::span<const double> times, std::span<const double> q2,
                     const std::function<double(double)>& omega2_dot, double mass);

// Bloch-parametrized basis |n+> = (cos(theta/2), e^{i phi} sin(theta/2)).
CMatrix bloch_basis(double theta, double phi);

struct Landscape {
  std::vector<double> theta;
  std::vector<double> phi;
  Eigen::MatrixXd value;  // theta x phi: p * sum|S(basis, z)| + (1-p) * sum|S(basis, x)|
  double min_value = 0.0;
  double theta_min = 0.0;
  double phi_min = 0.0;
  double max_value = 0.0;
  double theta_max = 0.0;
  double phi_max = 0.0;
};

Landscape overlap_landscape(double p, std::size_t n_theta = 181, std::size_t n_phi = 361);

// 2 sqrt 2 min(p, 1-p) + 2 max(p, 1-p)
double landscape_minimum(double p);

}  // namespace nrc
