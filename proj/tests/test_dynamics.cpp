#include "doctest.h"

#include <cmath>
#include <random>

#include "nrc/dynamics.hpp"
#include "nrc/error.hpp"
#include "nrc/fock.hpp"
#include "nrc/quadrature.hpp"
#include "nrc/states.hpp"
#include "test_util.hpp"

using namespace nrc;

namespace {

CMatrix ket_density(const Eigen::Vector2cd& v) { return v * v.adjoint(); }

CMatrix random_density(std::mt19937& rng, int n) {
  std::normal_distribution<double> g;
  CMatrix a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a(i, j) = {g(rng), g(rng)};
  CMatrix r = a * a.adjoint();
  return r / r.trace();
}

CMatrix commutator(const CMatrix& a, const CMatrix& b) { return a * b - b * a; }

// d<O>/dt for the oscillator master equation evaluated in a Fock basis.
GaussianMoments fock_moment_rates(const GaussianMoments& m, double mass, double w, const NoiseChannel& ch,
                                  std::size_t d) {
  const auto ops = fock_operators(d, mass, w);
  const CMatrix rho = gaussian_to_fock(m, mass, w, d);
  const CMatrix H = ops.p * ops.p / (2 * mass) + 0.5 * mass * w * w * ops.q * ops.q;
  const DenseChannel dc{ch.op == NoiseOperator::q ? ops.q : CMatrix(ops.q * ops.q), ch.eta};
  const CMatrix drho = lindblad_rhs(rho, H, std::span<const DenseChannel>(&dc, 1));
  auto ex = [&](const CMatrix& o) { return (drho * o).trace().real(); };
  GaussianMoments r;
  r.q = ex(ops.q);
  r.p = ex(ops.p);
  const double dq2 = ex(ops.q * ops.q), dp2 = ex(ops.p * ops.p);
  const double dqp = ex(0.5 * (ops.q * ops.p + ops.p * ops.q));
  r.vqq = dq2 - 2 * m.q * r.q;
  r.vpp = dp2 - 2 * m.p * r.p;
  r.vqp = dqp - m.q * r.p - m.p * r.q;
  return r;
}

}  // namespace

TEST_CASE("Lindblad right-hand side") {
  const DenseChannel x{sigma_x(), 0.3}, z{sigma_z(), 0.3};
  const CMatrix zero = CMatrix::Zero(2, 2);

  const CMatrix mixed = CMatrix::Identity(2, 2) / 2.0;
  CHECK(lindblad_rhs(mixed, sigma_z(), std::span<const DenseChannel>(&x, 1)).norm() < 1e-16);

  CMatrix up = CMatrix::Zero(2, 2);
  up(0, 0) = 1.0;
  CHECK(lindblad_rhs(up, zero, std::span<const DenseChannel>(&x, 1))(0, 0).real() ==
        doctest::Approx(-2 * 0.3));

  const CMatrix plus = ket_density(Eigen::Vector2cd(1, 1) / std::sqrt(2.0));
  const CMatrix d = lindblad_rhs(plus, zero, std::span<const DenseChannel>(&z, 1));
  CHECK(d(0, 1).real() == doctest::Approx(-4 * 0.3 * plus(0, 1).real()));
}

TEST_CASE("pure dephasing follows the analytic decay") {
  const double eta = 0.25;
  const DenseChannel z{sigma_z(), eta};
  const CMatrix plus = ket_density(Eigen::Vector2cd(1, 1) / std::sqrt(2.0));
  const std::vector<double> times = {0.1, 0.5, 2.0, 4.0};
  const auto r = integrate_master(plus, [](double) -> CMatrix { return CMatrix::Zero(2, 2); },
                                  std::span<const DenseChannel>(&z, 1), times);
  for (std::size_t i = 0; i < times.size(); ++i)
    CHECK(test::rel(r.states[i](0, 1).real(), 0.5 * std::exp(-4 * eta * times[i])) < 1e-7);
  CHECK(r.max_trace_drift < 1e-8);
}

TEST_CASE("noiseless two-level shortcut reaches the target") {
  const auto p = make_tls_protocol(10.0, 0.5, {});
  const auto r = simulate_tls(p, {});
  CHECK(r.final_state(1, 1).real() > 1 - 1e-6);
}

TEST_CASE("purity never increases under a single Hermitian channel") {
  std::mt19937 rng(2);
  const CMatrix rho0 = random_density(rng, 3);
  CMatrix X = random_density(rng, 3);
  const DenseChannel ch{X, 0.7};
  const auto times = quad::uniform_grid(0.0, 2.0, 81);
  const auto r = integrate_master(rho0, [](double) -> CMatrix { return CMatrix::Zero(3, 3); },
                                  std::span<const DenseChannel>(&ch, 1), std::span<const double>(times).subspan(1));
  double prev = (rho0 * rho0).trace().real();
  for (const auto& s : r.states) {
    const double pur = (s * s).trace().real();
    CHECK(pur <= prev + 1e-10);
    prev = pur;
  }
}

TEST_CASE("truncated ladder operators") {
  const double m = 2.0, w = 3.0;
  const auto two = fock_operators(2, m, w);
  CHECK((two.q - sigma_x() / std::sqrt(2 * m * w)).norm() < 1e-15);

  const auto ops = fock_operators(60, m, w);
  CHECK((ops.q * ops.q)(0, 0).real() == doctest::Approx(1 / (2 * m * w)).epsilon(1e-14));
  const CMatrix c = commutator(ops.q, ops.p) - cplx(0, 1) * CMatrix::Identity(60, 60);
  CHECK(c.topLeftCorner(58, 58).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(c.bottomRightCorner(1, 1).cwiseAbs().maxCoeff() > 1.0);  // truncation edge
}

TEST_CASE("Gaussian moment equations") {
  const double m = 1.3, w = 0.8;
  SUBCASE("noiseless flow conserves the uncertainty product of a pure state") {
    const auto v = coherent_moments({0.5, -0.2}, w, m);
    const auto d = gaussian_moment_rhs(v, w * w, m, {});
    const double rate = d.vqq * v.vpp + v.vqq * d.vpp - 2 * v.vqp * d.vqp;
    CHECK(std::abs(rate) < 1e-15);
  }
  SUBCASE("position noise heats momentum linearly") {
    const NoiseChannel q{NoiseOperator::q, 0.01};
    const auto d = gaussian_moment_rhs(thermal_moments(0, w, m), w * w, m, std::span<const NoiseChannel>(&q, 1));
    CHECK(d.vpp == doctest::Approx(2 * 0.01).epsilon(1e-14));
    CHECK(d.q == 0.0);
    CHECK(d.vqq == 0.0);
  }
  SUBCASE("frequency noise from the vacuum") {
    const NoiseChannel q2{NoiseOperator::q_squared, 0.01};
    const auto vac = thermal_moments(0, w, m);
    const auto d = gaussian_moment_rhs(vac, w * w, m, std::span<const NoiseChannel>(&q2, 1));
    CHECK(d.vpp == doctest::Approx(8 * 0.01 / (2 * m * w)).epsilon(1e-14));
    const auto f = fock_moment_rates(vac, m, w, q2, 80);
    CHECK(d.vpp == doctest::Approx(f.vpp).epsilon(1e-10));
  }
  SUBCASE("rates agree with the Fock-basis superoperator for a displaced squeezed state") {
    const GaussianMoments g{0.3, -0.2, 0.7, 0.5, 0.1};
    for (auto op : {NoiseOperator::q, NoiseOperator::q_squared}) {
      const NoiseChannel ch{op, 0.05};
      const auto a = gaussian_moment_rhs(g, w * w, m, std::span<const NoiseChannel>(&ch, 1));
      const auto b = fock_moment_rates(g, m, w, ch, 80);
      CHECK(a.q == doctest::Approx(b.q).epsilon(1e-9));
      CHECK(a.p == doctest::Approx(b.p).epsilon(1e-9));
      CHECK(a.vqq == doctest::Approx(b.vqq).epsilon(1e-9));
      CHECK(a.vpp == doctest::Approx(b.vpp).epsilon(1e-9));
      CHECK(a.vqp == doctest::Approx(b.vqp).epsilon(1e-9));
    }
  }
  SUBCASE("Pauli tags are rejected") {
    const NoiseChannel z{NoiseOperator::sigma_z, 0.01};
    CHECK_THROWS_AS(gaussian_moment_rhs(thermal_moments(0, w, m), w * w, m, std::span<const NoiseChannel>(&z, 1)),
                    Error);
  }
}

TEST_CASE("eigenvalue rates of the invariant") {
  const double eta = 0.2, wr = 3.0;
  const auto zb = invariant_spectrum(wr * sigma_z());
  CHECK(lambda_dot(zb, sigma_z(), eta).norm() < 1e-15);
  CHECK(lambda_dot(zb, sigma_x(), 0.0).norm() == 0.0);

  const auto xb = invariant_spectrum(wr * sigma_x());
  const auto ld = lambda_dot(xb, sigma_z(), eta);
  const Eigen::Index top = xb.lambda(1) > xb.lambda(0) ? 1 : 0;
  CHECK(ld(top) == doctest::Approx(4 * eta * wr).epsilon(1e-14));

  // Heisenberg propagation of I under -eta[X,[X,I]] for a short step: the
  // eigenvalue drift has the magnitude of lambda_dot with opposite sign.
  std::mt19937 rng(4);
  for (int k = 0; k < 5; ++k) {
    const CMatrix I = random_density(rng, 3) - CMatrix::Identity(3, 3) / 3.0;
    const CMatrix X = random_density(rng, 3);
    const auto sp = invariant_spectrum(I);
    const auto rate = lambda_dot(sp, X, eta);
    for (double h : {1e-4, 5e-5}) {
      const CMatrix I2 = I - h * eta * commutator(X, commutator(X, I));
      const auto sp2 = invariant_spectrum(I2);
      for (Eigen::Index l = 0; l < 3; ++l)
        CHECK(std::abs((sp2.lambda(l) - sp.lambda(l)) / h + rate(l)) < 50 * h);
    }
  }
}

TEST_CASE("dissipative matrix elements in the invariant basis") {
  const double eta = 0.4;
  SUBCASE("common eigenbasis") {
    const CMatrix X = Eigen::Vector3d(1.0, -0.5, 2.0).cast<cplx>().asDiagonal();
    const auto sp = invariant_spectrum(CMatrix(Eigen::Vector3d(3.0, 1.0, -2.0).cast<cplx>().asDiagonal()));
    std::mt19937 rng(6);
    const CMatrix rho = random_density(rng, 3);
    const CMatrix rho_b = sp.vectors.adjoint() * rho * sp.vectors;
    const CMatrix d = dissipative_matrix_elements(rho_b, sp, X, eta);
    const CMatrix xb = sp.vectors.adjoint() * X * sp.vectors;
    for (int l = 0; l < 3; ++l) {
      CHECK(std::abs(d(l, l)) < 1e-12);
      for (int k = 0; k < 3; ++k) {
        const double dx = (xb(l, l) - xb(k, k)).real();
        CHECK(std::abs(d(l, k) + eta * dx * dx * rho_b(l, k)) < 1e-12);
      }
    }
  }
  SUBCASE("direct superoperator oracle") {
    std::mt19937 rng(9);
    const auto sp = invariant_spectrum(sigma_x());
    for (int k = 0; k < 10; ++k) {
      const CMatrix rho = random_density(rng, 2);
      const DenseChannel ch{sigma_z(), eta};
      const CMatrix direct = sp.vectors.adjoint() *
                             lindblad_rhs(rho, CMatrix::Zero(2, 2), std::span<const DenseChannel>(&ch, 1)) *
                             sp.vectors;
      const CMatrix d = dissipative_matrix_elements(sp.vectors.adjoint() * rho * sp.vectors, sp, sigma_z(), eta);
      CHECK((d - direct).cwiseAbs().maxCoeff() < 1e-12);
    }
  }
}

TEST_CASE("Fock integrator agrees with the moment equations") {
  // constant trap, coherent and thermal inputs, both channels; strengths give
  // about a 50% rise of V_pp over the run
  const double m = units::default_ion_mass, w = units::mhz_to_angular(2.53), tf = 2.0;
  const auto trap = constant_trap(w, m, tf);
  struct Case {
    NoiseChannel ch;
    FockInitial init;
    double occ;
    GaussianMoments m0;
  };
  const Case cases[] = {
      {{NoiseOperator::q, 6e-4}, coherent_initial({1.0, 1.0}), 2.0,
       coherent_moments({1.0, 1.0}, w, m)},
      {{NoiseOperator::q_squared, 3e-6}, thermal_initial(1.0), 1.0,
       thermal_moments(1.0, w, m)},
  };
  for (const auto& c : cases) {
    const auto g = integrate_moments(c.m0, trap, std::span<const NoiseChannel>(&c.ch, 1), std::vector<double>{tf});
    FockOptions fo;
    const auto f = integrate_fock(c.init, c.occ, trap, lab_frame(), std::span<const NoiseChannel>(&c.ch, 1), fo);
    CHECK(!f.truncation_warning);
    const auto& a = g.final_moments;
    const auto& b = f.lab_moments;
    const double sq = std::sqrt(a.vqq), sp = std::sqrt(a.vpp);
    CHECK(std::abs(a.q - b.q) < 1e-4 * std::max(std::abs(a.q), sq));
    CHECK(std::abs(a.p - b.p) < 1e-4 * std::max(std::abs(a.p), sp));
    CHECK(test::rel(b.vqq, a.vqq) < 1e-4);
    CHECK(test::rel(b.vpp, a.vpp) < 1e-4);
    CHECK(std::abs(a.vqp - b.vqp) < 1e-4 * sq * sp);
    CHECK(f.max_trace_drift < 1e-8);
  }
}
