#include "nrc/dynamics.hpp"

#include <algorithm>
#include <cmath>

#include "nrc/error.hpp"

namespace nrc {

std::string to_string(NoiseOperator op) {
  switch (op) {
    case NoiseOperator::sigma_z: return "sigma_z";
    case NoiseOperator::sigma_x: return "sigma_x";
    case NoiseOperator::q: return "q";
    case NoiseOperator::q_squared: return "q_squared";
  }
  return "?";
}

NoiseOperator noise_operator_from_string(const std::string& s) {
  if (s == "sigma_z") return NoiseOperator::sigma_z;
  if (s == "sigma_x") return NoiseOperator::sigma_x;
  if (s == "q") return NoiseOperator::q;
  if (s == "q_squared" || s == "q2") return NoiseOperator::q_squared;
  throw Error(ErrorKind::config, "unknown noise operator '" + s + "'");
}

bool is_pauli(NoiseOperator op) { return op == NoiseOperator::sigma_z || op == NoiseOperator::sigma_x; }

std::vector<DenseChannel> pauli_channels(std::span<const NoiseChannel> channels) {
  std::vector<DenseChannel> out;
  for (const auto& c : channels) {
    if (!is_pauli(c.op)) throw Error(ErrorKind::unsupported_channel, "expected a Pauli channel");
    if (c.eta < 0.0) throw Error(ErrorKind::invalid_argument, "noise strength must be non-negative");
    out.push_back({c.op == NoiseOperator::sigma_z ? CMatrix(sigma_z()) : CMatrix(sigma_x()), c.eta});
  }
  return out;
}

CMatrix lindblad_rhs(const CMatrix& rho, const CMatrix& H, std::span<const DenseChannel> channels) {
  if (rho.rows() != H.rows() || rho.cols() != H.cols())
    throw Error(ErrorKind::dimension_mismatch, "state and Hamiltonian differ in dimension");
  const cplx mi(0.0, -1.0);
  CMatrix out = mi * (H * rho - rho * H);
  for (const auto& ch : channels) {
    if (ch.X.rows() != rho.rows())
      throw Error(ErrorKind::dimension_mismatch, "noise operator differs in dimension");
    const CMatrix inner = ch.X * rho - rho * ch.X;
    out -= ch.eta * (ch.X * inner - inner * ch.X);
  }
  return out;
}

MasterResult integrate_master(const CMatrix& rho0, const std::function<CMatrix(double)>& H,
                              std::span<const DenseChannel> channels,
                              std::span<const double> times, const OdeOptions& opt) {
  if (times.empty()) throw Error(ErrorKind::invalid_argument, "no sample times");
  MasterResult res;
  Dopri5<CMatrix> ode([&](double t, const CMatrix& r) { return lindblad_rhs(r, H(t), channels); }, opt);
  ode.set_post_step([](double, CMatrix& r) { r = 0.5 * (r + r.adjoint()).eval(); });
  res.final_state = ode.integrate(rho0, 0.0, times, [&](std::size_t, double t, const CMatrix& r) {
    res.times.push_back(t);
    res.states.push_back(r);
    res.max_trace_drift = std::max(res.max_trace_drift, std::abs(r.trace() - rho0.trace()));
  });
  res.stats = ode.stats();
  return res;
}

MasterResult simulate_tls(const TlsProtocol& p, std::span<const NoiseChannel> channels,
                          const OdeOptions& opt, std::size_t samples) {
  const auto dense = pauli_channels(channels);
  CMatrix rho0 = CMatrix::Zero(2, 2);
  rho0(0, 0) = 1.0;
  std::vector<double> times(std::max<std::size_t>(samples, 1));
  for (std::size_t i = 0; i < times.size(); ++i)
    times[i] = times.size() == 1 ? p.t_f() : p.t_f() * static_cast<double>(i) / static_cast<double>(times.size() - 1);
  return integrate_master(rho0, [&p](double t) { return CMatrix(p.hamiltonian(t)); }, dense, times, opt);
}

GaussianMoments gaussian_moment_rhs(const GaussianMoments& m, double omega2, double mass,
                                    std::span<const NoiseChannel> channels) {
  GaussianMoments d;
  d.q = m.p / mass;
  d.p = -mass * omega2 * m.q;
  d.vqq = 2.0 * m.vqp / mass;
  d.vpp = -2.0 * mass * omega2 * m.vqp;
  d.vqp = m.vpp / mass - mass * omega2 * m.vqq;
  for (const auto& c : channels) {
    switch (c.op) {
      case NoiseOperator::q: d.vpp += 2.0 * c.eta; break;
      case NoiseOperator::q_squared: d.vpp += 8.0 * c.eta * m.q2(); break;
      default: throw Error(ErrorKind::unsupported_channel, "moment equations need q or q^2 noise");
    }
  }
  return d;
}

namespace {

using Vec5 = Eigen::Matrix<double, 5, 1>;

Vec5 pack(const GaussianMoments& m) { return (Vec5() << m.q, m.p, m.vqq, m.vpp, m.vqp).finished(); }
GaussianMoments unpack(const Vec5& v) { return {v(0), v(1), v(2), v(3), v(4)}; }

}  // namespace

MomentTrajectory integrate_moments(const GaussianMoments& m0, const TrapSchedule& trap,
                                   std::span<const NoiseChannel> channels,
                                   std::span<const double> times, const OdeOptions& opt) {
  for (const auto& c : channels)
    if (is_pauli(c.op)) throw Error(ErrorKind::unsupported_channel, "moment equations need q or q^2 noise");
  MomentTrajectory out;
  Dopri5<Vec5> ode(
      [&](double t, const Vec5& y) {
        return pack(gaussian_moment_rhs(unpack(y), trap.omega2(t), trap.mass, channels));
      },
      opt);
  const Vec5 y = ode.integrate(pack(m0), 0.0, times, [&](std::size_t, double t, const Vec5& v) {
    out.times.push_back(t);
    out.moments.push_back(unpack(v));
  });
  out.final_moments = unpack(y);
  out.stats = ode.stats();
  return out;
}

InvariantSpectrum invariant_spectrum(const CMatrix& I) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(0.5 * (I + I.adjoint()));
  InvariantSpectrum s;
  s.lambda = es.eigenvalues();
  s.vectors = es.eigenvectors();
  return s;
}

Eigen::VectorXd lambda_dot(const InvariantSpectrum& spec, const CMatrix& X, double eta) {
  const CMatrix Xp = spec.vectors.adjoint() * X * spec.vectors;
  const CMatrix X2p = Xp * Xp;
  const Eigen::Index n = spec.lambda.size();
  Eigen::VectorXd out(n);
  for (Eigen::Index l = 0; l < n; ++l) {
    double acc = spec.lambda(l) * X2p(l, l).real();
    for (Eigen::Index k = 0; k < n; ++k) acc -= spec.lambda(k) * std::norm(Xp(k, l));
    out(l) = 2.0 * eta * acc;
  }
  return out;
}

CMatrix dissipative_matrix_elements(const CMatrix& rho, const InvariantSpectrum& spec,
                                    const CMatrix& X, double eta) {
  if (rho.rows() != spec.vectors.rows() || X.rows() != spec.vectors.rows())
    throw Error(ErrorKind::dimension_mismatch, "basis and operators differ in dimension");
  const CMatrix Xp = spec.vectors.adjoint() * X * spec.vectors;
  const CMatrix X2p = Xp * Xp;
  const Eigen::Index n = rho.rows();
  CMatrix out(n, n);
  for (Eigen::Index l = 0; l < n; ++l)
    for (Eigen::Index k = 0; k < n; ++k) {
      cplx acc = 0.0;
      for (Eigen::Index j = 0; j < n; ++j) acc += rho(j, k) * X2p(l, j) + rho(l, j) * X2p(j, k);
      cplx cross = 0.0;
      for (Eigen::Index a = 0; a < n; ++a)
        for (Eigen::Index b = 0; b < n; ++b) cross += rho(a, b) * Xp(l, a) * Xp(b, k);
      out(l, k) = -eta * (acc - 2.0 * cross);
    }
  return out;
}

}  // namespace nrc
