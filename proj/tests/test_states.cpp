#include "doctest.h"

#include <cmath>
#include <random>

#include "nrc/dynamics.hpp"
#include "nrc/error.hpp"
#include "nrc/fock.hpp"
#include "nrc/states.hpp"
#include "test_util.hpp"

using namespace nrc;

namespace {

CMatrix random_density(std::mt19937& rng, int n, int rank) {
  std::normal_distribution<double> g;
  CMatrix a(n, rank);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < rank; ++j) a(i, j) = {g(rng), g(rng)};
  CMatrix r = a * a.adjoint();
  return r / r.trace();
}

CMatrix random_unitary(std::mt19937& rng, int n) {
  std::normal_distribution<double> g;
  CMatrix a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a(i, j) = {g(rng), g(rng)};
  return Eigen::HouseholderQR<CMatrix>(a).householderQ();
}

// F = sum of sqrt of eigenvalues of sqrt(rho) sigma sqrt(rho), via a fresh
// eigensolve of rho (no shared code with the library).
double brute_fidelity(const CMatrix& rho, const CMatrix& sigma) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(rho);
  const Eigen::VectorXd ev = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  const CMatrix sr = es.eigenvectors() * ev.cast<cplx>().asDiagonal() * es.eigenvectors().adjoint();
  Eigen::SelfAdjointEigenSolver<CMatrix> m(sr * sigma * sr);
  return m.eigenvalues().cwiseMax(0.0).cwiseSqrt().sum();
}

}  // namespace

TEST_CASE("Uhlmann fidelity") {
  CMatrix up = CMatrix::Zero(2, 2), down = CMatrix::Zero(2, 2);
  up(0, 0) = 1.0;
  down(1, 1) = 1.0;
  CHECK(uhlmann_fidelity(up, up) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(std::abs(uhlmann_fidelity(up, down)) < 1e-7);

  CMatrix rho = CMatrix::Zero(2, 2);
  rho(0, 0) = 0.75;
  rho(1, 1) = 0.25;
  const CMatrix plus = CMatrix::Constant(2, 2, 0.5);
  CHECK(uhlmann_fidelity(rho, plus) == doctest::Approx(std::sqrt(0.5)).epsilon(1e-12));
  CHECK(uhlmann_fidelity(rho, plus) == doctest::Approx(brute_fidelity(rho, plus)).epsilon(1e-12));

  std::mt19937 rng(21);
  for (int k = 0; k < 30; ++k) {
    const CMatrix a = random_density(rng, 4, 1 + k % 4), b = random_density(rng, 4, 4);
    const double f = uhlmann_fidelity(a, b);
    // null eigenvalues of a rank-deficient state carry ~eps noise, i.e. ~sqrt(eps) in F
    const double tol = k % 4 == 3 ? 1e-10 : 1e-7;
    CHECK(f == doctest::Approx(uhlmann_fidelity(b, a)).epsilon(1e-10));
    const CMatrix u = random_unitary(rng, 4);
    CHECK(uhlmann_fidelity(u * a * u.adjoint(), u * b * u.adjoint()) == doctest::Approx(f).epsilon(tol));
    CHECK(std::abs(f - brute_fidelity(a, b)) < 1e-7);  // oracle loses digits near rank deficiency
    CHECK(f <= 1.0 + 1e-12);
  }
  CHECK_THROWS_AS(hermitian_sqrt(-CMatrix::Identity(2, 2)), Error);
}

TEST_CASE("density validation") {
  CHECK_NOTHROW(validate_density(CMatrix::Identity(3, 3) / 3.0));
  CHECK_THROWS_AS(validate_density(CMatrix::Identity(3, 3)), Error);
  CMatrix bad = CMatrix::Zero(2, 2);
  bad(0, 0) = 1.5;
  bad(1, 1) = -0.5;
  CHECK_THROWS_AS(validate_density(bad), Error);
  CHECK_THROWS_AS(validate_moments(GaussianMoments{0, 0, 0.1, 0.1, 0}), Error);
}

TEST_CASE("Gaussian fidelity") {
  const double m = 0.7;
  const auto a = coherent_moments({0.3, -1.2}, 2.0, m);
  CHECK(gaussian_fidelity(a, a) == doctest::Approx(1.0).epsilon(1e-12));
  for (double w2 : {1.0, 3.0, 0.1}) {
    const double w1 = 2.0;
    CHECK(gaussian_fidelity(thermal_moments(0, w1, m), thermal_moments(0, w2, m)) ==
          doctest::Approx(std::sqrt(2 * std::sqrt(w1 * w2) / (w1 + w2))).epsilon(1e-12));
  }
  const auto b = thermal_moments(3.0, 1.0, m), c = thermal_moments(2.0, 1.7, m);
  CHECK(gaussian_fidelity(b, c) == doctest::Approx(gaussian_fidelity(c, b)).epsilon(1e-12));
}

TEST_CASE("Gaussian fidelity agrees with the Fock representation") {
  const double m = 1.0, w = 1.0;
  const std::size_t d = 120;
  struct Pair {
    GaussianMoments a, b;
  };
  const Pair pairs[] = {
      {thermal_moments(12.58 / 8, w, m), thermal_moments(12.58 / 8, 0.5 * w, m)},
      {coherent_moments({1.0, 1.0}, w, m), coherent_moments({0.8, 1.3}, 1.2 * w, m)},
      {GaussianMoments{0.4, -0.3, 0.9, 0.8, 0.2}, thermal_moments(0.5, w, m)},
  };
  for (const auto& pr : pairs) {
    const CMatrix ra = gaussian_to_fock(pr.a, m, w, d), rb = gaussian_to_fock(pr.b, m, w, d);
    CHECK(std::abs(gaussian_fidelity(pr.a, pr.b) - uhlmann_fidelity(ra, rb)) < 1e-4);
  }
}

TEST_CASE("thermal states") {
  const double m = 0.9, w = 1.4;
  const auto vac = thermal_moments(0.0, w, m);
  CHECK(vac.uncertainty() == doctest::Approx(0.25).epsilon(1e-14));
  const auto t = thermal_moments(12.58, w, m);
  CHECK(t.vqq == doctest::Approx(13.08 / (m * w)));
  CHECK(t.vpp == doctest::Approx(13.08 * m * w));
  // purity of a Gaussian state is 1 / (2 sqrt det V)
  CHECK(1.0 / (2.0 * std::sqrt(t.uncertainty())) == doctest::Approx(1.0 / (2 * 12.58 + 1)).epsilon(1e-14));
  const CMatrix f = thermal_fock(12.58, 400);
  CHECK((f * f).trace().real() == doctest::Approx(1.0 / (2 * 12.58 + 1)).epsilon(1e-9));
  CHECK(1.0 - f.trace().real() < 1e-10);
  CHECK(f(1, 1).real() / f(0, 0).real() == doctest::Approx(12.58 / 13.58).epsilon(1e-14));
}

TEST_CASE("coherent states") {
  const double m = 1.1, w = 0.6;
  const auto c = coherent_moments({1.0, 1.0}, w, m);
  CHECK(c.q == doctest::Approx(std::sqrt(2 / (m * w))));
  CHECK(c.p == doctest::Approx(std::sqrt(2 * m * w)));
  const auto zero = coherent_moments({0, 0}, w, m);
  const auto vac = thermal_moments(0, w, m);
  CHECK(zero.vqq == vac.vqq);
  CHECK(zero.vpp == vac.vpp);

  const auto v = coherent_fock({1.0, 1.0}, 40);
  const auto ops = fock_operators(40, m, w);
  CHECK((v.adjoint() * ops.n * v)(0, 0).real() == doctest::Approx(2.0).epsilon(1e-10));
  const auto mf = moments_from_density(v * v.adjoint(), ops.q, ops.p);
  CHECK(std::abs(mf.q - c.q) < 1e-10);
  CHECK(std::abs(mf.p - c.p) < 1e-10);
  CHECK(std::abs(mf.vqq - c.vqq) < 1e-10);
  CHECK(std::abs(mf.vpp - c.vpp) < 1e-10);
  CHECK(std::abs(mf.vqp - c.vqp) < 1e-10);
}

TEST_CASE("Gaussian and Fock forms of the same state share their moments") {
  const double m = 1.0, w = 1.0;
  const GaussianMoments g{0.4, -0.3, 0.9, 0.8, 0.2};
  const std::size_t d = 120;
  const auto ops = fock_operators(d, m, w);
  const auto f = moments_from_density(gaussian_to_fock(g, m, w, d), ops.q, ops.p);
  CHECK(std::abs(f.q - g.q) < 1e-10);
  CHECK(std::abs(f.p - g.p) < 1e-10);
  CHECK(std::abs(f.vqq - g.vqq) < 1e-10);
  CHECK(std::abs(f.vpp - g.vpp) < 1e-10);
  CHECK(std::abs(f.vqp - g.vqp) < 1e-10);
}

TEST_CASE("coherent target after an expansion") {
  const double m = 1.0, w0 = 3.0, wf = 0.03;
  const std::complex<double> a(1.0, 1.0);
  CHECK(std::abs(target_coherent(a, 0.0, w0, wf, m).alpha_tilde - a) < 1e-15);
  CHECK(std::abs(target_coherent(a, units::pi / w0, w0, wf, m).alpha_tilde + a) < 1e-14);

  const auto f = test::fig3_family();
  const double r6[1] = {0.0};
  const auto p = constrain_g_phase(f, 50.5, r6);
  const auto t = target_coherent(a, p.g(), f.omega0, f.omega_f, f.mass);
  const double expected = std::remainder(std::arg(a) - 50.5 * f.omega0, 2 * units::pi);
  const double got = std::remainder(std::arg(t.alpha_tilde), 2 * units::pi);
  CHECK(std::abs(std::remainder(got - expected, 2 * units::pi)) < 1e-9 * 50.5 * f.omega0);
  CHECK(t.global_phase == doctest::Approx(-p.g() * f.omega0 / 2));
  CHECK(t.moments.q == doctest::Approx(std::sqrt(2 / (f.mass * f.omega_f)) * t.alpha_tilde.real()));
}

TEST_CASE("noiseless oscillator shortcuts reach their targets") {
  SUBCASE("coherent, inverse form") {
    const auto f = test::fig3_family();
    const double r6[1] = {0.0};
    const auto p = constrain_g_phase(f, 50.5, r6);
    const std::complex<double> a(1.0, 1.0);
    const auto m0 = coherent_moments(a, f.omega0, f.mass);
    const auto r = integrate_moments(m0, trap_schedule(p), {}, std::vector<double>{p.t_f()});
    const auto target = target_coherent(a, p.g(), f.omega0, f.omega_f, f.mass);
    CHECK(gaussian_fidelity(r.final_moments, target.moments) > 1 - 1e-6);
  }
  SUBCASE("thermal, square-root form") {
    const auto f = test::fig4_family(3.0);
    const auto p = make_ho_protocol(f, {});
    const auto r = integrate_moments(thermal_moments(12.58, f.omega0, f.mass), trap_schedule(p), {},
                                     std::vector<double>{p.t_f()});
    CHECK(gaussian_fidelity(r.final_moments, thermal_moments(12.58, f.omega_f, f.mass)) > 1 - 1e-6);
  }
}
