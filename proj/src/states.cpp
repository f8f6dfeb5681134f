#include "nrc/states.hpp"

#include <algorithm>
#include <cmath>

#include "nrc/error.hpp"
#include "nrc/fock.hpp"

namespace nrc {

void validate_moments(const GaussianMoments& m, double tol) {
  if (!(m.vqq > 0.0) || !(m.vpp > 0.0))
    throw Error(ErrorKind::invalid_covariance, "variances must be positive");
  if (!(m.uncertainty() >= 0.25 - tol))
    throw Error(ErrorKind::invalid_covariance, "covariance violates the uncertainty relation");
}

void validate_density(const CMatrix& rho) {
  if (rho.rows() != rho.cols() || rho.rows() == 0)
    throw Error(ErrorKind::dimension_mismatch, "density matrix must be square and non-empty");
  const double scale = std::max(1.0, rho.norm());
  if ((rho - rho.adjoint()).norm() > 1e-12 * scale)
    throw Error(ErrorKind::invalid_argument, "density matrix is not Hermitian");
  if (std::abs(rho.trace() - cplx(1.0, 0.0)) > 1e-9)
    throw Error(ErrorKind::invalid_argument, "density matrix trace differs from one");
  Eigen::SelfAdjointEigenSolver<CMatrix> es(rho, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < -1e-8)
    throw Error(ErrorKind::non_psd_input, "density matrix has a negative eigenvalue");
}

CMatrix hermitian_sqrt(const CMatrix& a, double clamp) {
  const CMatrix h = 0.5 * (a + a.adjoint());
  Eigen::SelfAdjointEigenSolver<CMatrix> es(h);
  Eigen::VectorXd ev = es.eigenvalues();
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    if (ev(i) < -clamp) throw Error(ErrorKind::non_psd_input, "matrix is not positive semidefinite");
    ev(i) = std::sqrt(std::max(ev(i), 0.0));
  }
  return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().adjoint();
}

double uhlmann_fidelity(const CMatrix& rho, const CMatrix& sigma) {
  if (rho.rows() != sigma.rows() || rho.cols() != sigma.cols() || rho.rows() != rho.cols())
    throw Error(ErrorKind::dimension_mismatch, "fidelity arguments differ in dimension");
  for (const CMatrix* m : {&rho, &sigma}) {
    Eigen::SelfAdjointEigenSolver<CMatrix> es(0.5 * (*m + m->adjoint()), Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -1e-6)
      throw Error(ErrorKind::non_psd_input, "fidelity argument has an eigenvalue below -1e-6");
  }
  // trace norm of sqrt(rho) sqrt(sigma); singular values stay accurate near rank deficiency
  const CMatrix prod = hermitian_sqrt(rho, 1e-6) * hermitian_sqrt(sigma, 1e-6);
  const double f = Eigen::BDCSVD<CMatrix>(prod).singularValues().sum();
  return std::clamp(f, 0.0, 1.0);
}

double gaussian_fidelity(const GaussianMoments& a, const GaussianMoments& b) {
  validate_moments(a);
  validate_moments(b);
  Eigen::Matrix2d va, vb;
  va << a.vqq, a.vqp, a.vqp, a.vpp;
  vb << b.vqq, b.vqp, b.vqp, b.vpp;
  const Eigen::Matrix2d sum = va + vb;
  const Eigen::Vector2d d(a.q - b.q, a.p - b.p);
  const double big = sum.determinant();
  const double small = std::max(0.0, 4.0 * (va.determinant() - 0.25) * (vb.determinant() - 0.25));
  const double expo = -0.5 * d.dot(sum.inverse() * d);
  const double f2 = std::exp(expo) / (std::sqrt(big + small) - std::sqrt(small));
  return std::clamp(std::sqrt(f2), 0.0, 1.0);
}

GaussianMoments thermal_moments(double nbar, double omega, double mass) {
  if (nbar < 0.0) throw Error(ErrorKind::invalid_argument, "nbar must be non-negative");
  GaussianMoments m;
  m.vqq = (nbar + 0.5) / (mass * omega);
  m.vpp = (nbar + 0.5) * mass * omega;
  return m;
}

GaussianMoments coherent_moments(std::complex<double> alpha, double omega, double mass) {
  GaussianMoments m = thermal_moments(0.0, omega, mass);
  m.q = std::sqrt(2.0 / (mass * omega)) * alpha.real();
  m.p = std::sqrt(2.0 * mass * omega) * alpha.imag();
  return m;
}

CMatrix thermal_fock(double nbar, std::size_t d) {
  if (nbar < 0.0) throw Error(ErrorKind::invalid_argument, "nbar must be non-negative");
  CMatrix rho = CMatrix::Zero(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
  const double x = nbar / (nbar + 1.0);
  double w = 1.0 / (nbar + 1.0);
  for (std::size_t k = 0; k < d; ++k, w *= x) rho(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k)) = w;
  return rho;
}

Eigen::VectorXcd coherent_fock(std::complex<double> alpha, std::size_t d) {
  Eigen::VectorXcd v(static_cast<Eigen::Index>(d));
  std::complex<double> amp = std::exp(-0.5 * std::norm(alpha));
  for (std::size_t n = 0; n < d; ++n) {
    v(static_cast<Eigen::Index>(n)) = amp;
    amp *= alpha / std::sqrt(static_cast<double>(n + 1));
  }
  return v;
}

CMatrix gaussian_to_fock(const GaussianMoments& m, double mass, double omega_ref, std::size_t d,
                         std::size_t pad) {
  validate_moments(m);
  const std::size_t big = std::max<std::size_t>(pad, 1) * d;
  const auto ops = fock_operators(big, mass, omega_ref);
  const double nu = std::sqrt(m.uncertainty());
  // W^{-1} for W = V / nu (det W = 1)
  const double wqq = m.vpp / nu, wpp = m.vqq / nu, wqp = -m.vqp / nu;
  const auto n = static_cast<Eigen::Index>(big);
  const CMatrix Q = ops.q - m.q * CMatrix::Identity(n, n);
  const CMatrix P = ops.p - m.p * CMatrix::Identity(n, n);
  CMatrix K = 0.5 * (wqq * Q * Q + wpp * P * P + wqp * (Q * P + P * Q));
  K = 0.5 * (K + K.adjoint()).eval();
  Eigen::SelfAdjointEigenSolver<CMatrix> es(K);
  const double nbar = nu - 0.5;
  const auto& E = es.eigenvalues();
  Eigen::VectorXd w = Eigen::VectorXd::Zero(n);
  if (nbar <= 1e-12) {
    w(0) = 1.0;
  } else {
    const double beta = std::log((nbar + 1.0) / nbar);
    for (Eigen::Index i = 0; i < n; ++i) w(i) = std::exp(-beta * (E(i) - E(0)));
  }
  const auto dd = static_cast<Eigen::Index>(d);
  const CMatrix V = es.eigenvectors().topRows(dd);
  CMatrix rho = V * w.asDiagonal() * V.adjoint();
  rho /= rho.trace().real();
  return 0.5 * (rho + rho.adjoint());
}

GaussianMoments moments_from_density(const CMatrix& rho, const CMatrix& q, const CMatrix& p) {
  auto ev = [&](const CMatrix& op) { return (rho * op).trace().real(); };
  GaussianMoments m;
  m.q = ev(q);
  m.p = ev(p);
  m.vqq = ev(q * q) - m.q * m.q;
  m.vpp = ev(p * p) - m.p * m.p;
  m.vqp = 0.5 * ev(q * p + p * q) - m.q * m.p;
  return m;
}

CoherentTarget target_coherent(std::complex<double> alpha, double g, double omega0, double omega_f,
                               double mass) {
  CoherentTarget t;
  t.alpha_tilde = alpha * std::polar(1.0, -g * omega0);
  t.global_phase = -0.5 * g * omega0;
  t.moments = coherent_moments(t.alpha_tilde, omega_f, mass);
  return t;
}

}  // namespace nrc
