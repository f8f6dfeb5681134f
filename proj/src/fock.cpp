#include "nrc/fock.hpp"

#include <algorithm>
#include <cmath>

#include "nrc/error.hpp"
#include "nrc/quadrature.hpp"

namespace nrc {

namespace {

using SpMatrix = Eigen::SparseMatrix<cplx>;

SpMatrix sparse_annihilation(std::size_t d) {
  SpMatrix a(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
  std::vector<Eigen::Triplet<cplx>> trip;
  for (std::size_t n = 1; n < d; ++n)
    trip.emplace_back(static_cast<Eigen::Index>(n - 1), static_cast<Eigen::Index>(n), std::sqrt(static_cast<double>(n)));
  a.setFromTriplets(trip.begin(), trip.end());
  return a;
}

GaussianMoments linear_map(const GaussianMoments& m, const Eigen::Matrix2d& L) {
  Eigen::Matrix2d V;
  V << m.vqq, m.vqp, m.vqp, m.vpp;
  const Eigen::Vector2d mean = L * Eigen::Vector2d(m.q, m.p);
  const Eigen::Matrix2d W = L * V * L.transpose();
  return {mean(0), mean(1), W(0, 0), W(1, 1), 0.5 * (W(0, 1) + W(1, 0))};
}

}  // namespace

FockOperators fock_operators(std::size_t d, double mass, double omega_ref) {
  if (d < 2) throw Error(ErrorKind::invalid_argument, "Fock dimension must be at least 2");
  const auto n = static_cast<Eigen::Index>(d);
  FockOperators ops;
  ops.a = CMatrix::Zero(n, n);
  ops.n = CMatrix::Zero(n, n);
  for (Eigen::Index k = 1; k < n; ++k) ops.a(k - 1, k) = std::sqrt(static_cast<double>(k));
  for (Eigen::Index k = 0; k < n; ++k) ops.n(k, k) = static_cast<double>(k);
  const CMatrix ad = ops.a.adjoint();
  ops.q = (ops.a + ad) / std::sqrt(2.0 * mass * omega_ref);
  ops.p = cplx(0.0, std::sqrt(0.5 * mass * omega_ref)) * (ad - ops.a);
  return ops;
}

ScalingFrame lab_frame() {
  return {[](double) { return 1.0; }, [](double) { return 0.0; }, [](double) { return 0.0; },
          [](double t) { return t; }};
}

ScalingFrame protocol_frame(const HoProtocol& p) {
  ScalingFrame f;
  f.b = [p](double t) { return p.rho(t); };
  f.b_dot = [p](double t) { return p.rho_dot(t); };
  f.b_ddot = [p](double t) { return p.rho_ddot(t); };
  if (p.family().form == RhoForm::inverse_sqrt_poly) {
    const Polynomial anti = p.P().polynomial().antiderivative();
    f.inv_b2_integral = [anti, tf = p.t_f()](double t) { return tf * anti(t / tf); };
  } else {
    const auto rule = quad::gauss_legendre(48);
    f.inv_b2_integral = [p, rule](double t) {
      if (t <= 0.0) return 0.0;
      return quad::gauss_legendre_integrate(
          [&p](double u) {
            const double r = p.rho(u);
            return 1.0 / (r * r);
          },
          0.0, t, rule);
    };
  }
  return f;
}

GaussianMoments frame_to_lab(const GaussianMoments& m, double b, double b_dot, double mass) {
  Eigen::Matrix2d L;
  L << b, 0.0, mass * b_dot, 1.0 / b;
  return linear_map(m, L);
}

GaussianMoments lab_to_frame(const GaussianMoments& m, double b, double b_dot, double mass) {
  Eigen::Matrix2d L;
  L << 1.0 / b, 0.0, -mass * b_dot, b;
  return linear_map(m, L);
}

FockInitial thermal_initial(double nbar) {
  return [nbar](std::size_t d) { return thermal_fock(nbar, d); };
}

FockInitial coherent_initial(std::complex<double> alpha) {
  return [alpha](std::size_t d) {
    const Eigen::VectorXcd v = coherent_fock(alpha, d);
    return CMatrix(v * v.adjoint());
  };
}

namespace {

FockResult run_fixed(const FockInitial& initial, std::size_t d, const TrapSchedule& trap,
                     const ScalingFrame& frame, std::span<const NoiseChannel> channels,
                     const OdeOptions& opt) {
  const double m = trap.mass, w0 = trap.omega0;
  const double c = 1.0 / std::sqrt(2.0 * m * w0);
  const SpMatrix a = sparse_annihilation(d);
  const SpMatrix ad = SpMatrix(a.adjoint());
  const cplx mi(0.0, -1.0);

  auto rhs = [&](double t, const CMatrix& rho) {
    const double b = frame.b(t), bdd = frame.b_ddot(t);
    const double phi = w0 * frame.inv_b2_integral(t);
    const cplx e = std::polar(1.0, -phi);
    const SpMatrix x = c * (e * a + std::conj(e) * ad);
    const SpMatrix x2 = x * x;
    const double b2 = b * b;
    const double big_omega2 = trap.omega2(t) * b2 * b2 + b2 * b * bdd;
    const double delta = m / (2.0 * b2) * (big_omega2 - w0 * w0);
    CMatrix out = CMatrix::Zero(rho.rows(), rho.cols());
    if (delta != 0.0) {
      const CMatrix hr = x2 * rho;
      out += (mi * delta) * (hr - hr.adjoint());  // rho and x2 Hermitian: rho x2 = (x2 rho)^dag
    }
    for (const auto& ch : channels) {
      if (ch.eta == 0.0) continue;
      const SpMatrix& X = ch.op == NoiseOperator::q ? x : x2;
      const double scale = ch.op == NoiseOperator::q ? b2 : b2 * b2;
      const CMatrix xr = X * rho;
      const CMatrix inner = xr - xr.adjoint();
      const CMatrix xi = X * inner;
      out -= (ch.eta * scale) * (xi + xi.adjoint());  // inner anti-Hermitian: inner X = -(X inner)^dag
    }
    return out;
  };

  Dopri5<CMatrix> ode(rhs, opt);
  ode.set_post_step([](double, CMatrix& r) { r = 0.5 * (r + r.adjoint()).eval(); });
  const CMatrix rho0 = initial(d);
  FockResult res;
  const double times[1] = {trap.t_f};
  res.rho = ode.integrate(rho0, 0.0, std::span<const double>(times, 1),
                          [&](std::size_t, double, const CMatrix& r) {
                            res.max_trace_drift = std::abs(r.trace() - rho0.trace());
                          });
  res.stats = ode.stats();
  res.d = d;
  res.b = frame.b(trap.t_f);
  res.b_dot = frame.b_dot(trap.t_f);
  res.phase = w0 * frame.inv_b2_integral(trap.t_f);
  const auto n = static_cast<Eigen::Index>(d);
  res.top_population = res.rho(n - 1, n - 1).real() + res.rho(n - 2, n - 2).real();

  const auto ops = fock_operators(d, m, w0);
  const cplx e = std::polar(1.0, -res.phase);
  const CMatrix xI = c * (e * ops.a + std::conj(e) * ops.a.adjoint());
  const CMatrix pI = cplx(0.0, std::sqrt(0.5 * m * w0)) * (std::conj(e) * ops.a.adjoint() - e * ops.a);
  const GaussianMoments frame_m = moments_from_density(res.rho, xI, pI);
  res.lab_moments = frame_to_lab(frame_m, res.b, res.b_dot, m);
  return res;
}

}  // namespace

FockResult integrate_fock(const FockInitial& initial, double occupation, const TrapSchedule& trap,
                          const ScalingFrame& frame, std::span<const NoiseChannel> channels,
                          const FockOptions& opt) {
  for (const auto& ch : channels)
    if (is_pauli(ch.op)) throw Error(ErrorKind::unsupported_channel, "oscillator needs q or q^2 noise");
  if (opt.d != 0) {
    auto r = run_fixed(initial, opt.d, trap, frame, channels, opt.ode);
    r.truncation_warning = r.top_population > opt.leak_tol;
    return r;
  }
  std::size_t d = std::max<std::size_t>(40, static_cast<std::size_t>(std::ceil(8.0 * (occupation + 1.0))));
  d = std::min(d, std::max<std::size_t>(opt.d_max, 2));
  for (;;) {
    auto r = run_fixed(initial, d, trap, frame, channels, opt.ode);
    if (r.top_population < opt.leak_tol) return r;
    if (2 * d > opt.d_max) {
      r.truncation_warning = true;
      return r;
    }
    d *= 2;
  }
}

CMatrix fock_target(const GaussianMoments& lab_target, const FockResult& result, double mass,
                    double omega0) {
  const GaussianMoments fm = lab_to_frame(lab_target, result.b, result.b_dot, mass);
  CMatrix rho = gaussian_to_fock(fm, mass, omega0, result.d);
  for (Eigen::Index j = 0; j < rho.rows(); ++j)
    for (Eigen::Index k = 0; k < rho.cols(); ++k)
      rho(j, k) *= std::polar(1.0, result.phase * static_cast<double>(j - k));
  return rho;
}

}  // namespace nrc
