#include "doctest.h"

#include <cmath>
#include <random>

#include "nrc/error.hpp"
#include "nrc/measures.hpp"
#include "nrc/ode.hpp"
#include "nrc/polynomial.hpp"
#include "nrc/protocols.hpp"
#include "test_util.hpp"

using namespace nrc;

TEST_CASE("boundary polynomial through the inversion constraints") {
  const std::vector<PolynomialConstraint> g = {{0, 0, units::pi}, {1, 0, 0}, {0, 1, 0}, {1, 1, 0}};
  const auto cubic = solve_boundary_polynomial(g, 3, {});
  const double expected[4] = {units::pi, 0, -3 * units::pi, 2 * units::pi};
  for (int i = 0; i < 4; ++i) CHECK(std::abs(cubic.coefficients()[i] - expected[i]) < 1e-13);

  const double zero[1] = {0.0};
  const auto quartic = solve_boundary_polynomial(g, 4, zero);
  for (double s : {0.0, 0.2, 0.5, 0.9, 1.0}) CHECK(std::abs(quartic(s) - cubic(s)) < 1e-13);

  const auto line = solve_boundary_polynomial({{0, 0, 0}, {1, 0, 0}}, 1, {});
  for (double c : line.coefficients()) CHECK(c == 0.0);

  CHECK_THROWS_AS(solve_boundary_polynomial(g, 5, {}), Error);  // under-determined
}

TEST_CASE("polynomial calculus") {
  const Polynomial p({1.0, -2.0, 0.5, 3.0});
  CHECK(p.derivative_at(0.7, 1) == doctest::Approx(-2.0 + 0.7 + 9.0 * 0.49));
  CHECK(p.derivative(2)(0.3) == doctest::Approx(1.0 + 18.0 * 0.3));
  CHECK(p.antiderivative().derivative()(0.4) == doctest::Approx(p(0.4)));
  const auto q = p.taylor_shift(0.6);
  for (double x : {-1.0, 0.1, 0.6, 2.0}) CHECK(q(x - 0.6) == doctest::Approx(p(x)).epsilon(1e-13));
  CHECK(p.increment_from(0.6, 0.6 + 1e-9) == doctest::Approx(p.derivative_at(0.6, 1) * 1e-9).epsilon(1e-6));
}

TEST_CASE("two-level protocol boundary behaviour") {
  const auto p = make_tls_protocol(10.0, 0.5, {});
  const auto u0 = p.controls(0.0), u1 = p.controls(0.5);
  CHECK(u0.delta == doctest::Approx(10.0).epsilon(1e-9));
  CHECK(u1.delta == doctest::Approx(-10.0).epsilon(1e-9));
  CHECK(std::abs(u0.omega) < 1e-9);
  CHECK(std::abs(u1.omega) < 1e-9);
  CHECK(p.G(0.0) == doctest::Approx(units::pi));
  CHECK(std::abs(p.G(0.5)) < 1e-14);
  CHECK(std::abs(p.G_dot(0.0)) < 1e-12);
  CHECK(std::abs(p.G_dot(0.5)) < 1e-12);

  // controls stay finite on the interior
  for (int k = 1; k < 200; ++k) {
    const auto u = p.controls(0.5 * k / 200.0);
    CHECK(std::isfinite(u.delta));
    CHECK(std::isfinite(u.omega));
  }
}

TEST_CASE("a zero extra coefficient changes nothing") {
  const auto a = make_tls_protocol(10.0, 0.5, {});
  const double zero[1] = {0.0};
  const auto b = make_tls_protocol(10.0, 0.5, zero);
  for (double t : {0.0, 0.05, 0.2, 0.37, 0.5}) {
    CHECK(a.controls(t).delta == doctest::Approx(b.controls(t).delta).epsilon(1e-12));
    CHECK(a.controls(t).omega == doctest::Approx(b.controls(t).omega).epsilon(1e-12));
  }
}

TEST_CASE("a flatter G lowers O_z") {
  const auto standard = make_tls_protocol(10.0, 0.5, {});
  const double g4[1] = {9.0};
  const auto flat = make_tls_protocol(10.0, 0.5, g4);
  auto oz = [](const TlsProtocol& p) {
    return closed_form_O_z([&](double t) { return p.G(t); }, p.t_f());
  };
  CHECK(oz(flat) < oz(standard));
}

TEST_CASE("two-level protocols reject singular controls") {
  const double g_wild[1] = {60.0};  // G leaves (0, pi)
  CHECK_THROWS_AS(make_tls_protocol(10.0, 0.5, g_wild), Error);
  CHECK_THROWS_AS(make_tls_protocol(10.0, -1.0, {}), Error);
  BSpec through_zero;
  through_zero.extra = {-40.0};  // B crosses 0 on the interior
  CHECK_THROWS_AS(make_tls_protocol(10.0, 0.5, {}, through_zero), Error);
}

TEST_CASE("oscillator expansion boundary conditions") {
  SUBCASE("identity expansion") {
    HoFamily f = test::fig3_family();
    f.omega_f = f.omega0;
    const auto p = make_ho_protocol(f, {});
    for (double t : {0.0, 13.0, 50.0, 100.0}) {
      CHECK(p.rho(t) == doctest::Approx(1.0).epsilon(1e-13));
      CHECK(p.omega2(t) == doctest::Approx(f.omega0 * f.omega0).epsilon(1e-12));
    }
    CHECK(p.g() == doctest::Approx(100.0).epsilon(1e-12));
  }
  SUBCASE("hundredfold expansion, inverse form") {
    const auto p = make_ho_protocol(test::fig3_family(), {});
    CHECK(p.rho(0.0) == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(p.rho(100.0) == doctest::Approx(10.0).epsilon(1e-12));
    CHECK(std::abs(p.rho_dot(0.0)) < 1e-12);
    CHECK(std::abs(p.rho_dot(100.0)) < 1e-12);
    CHECK(std::abs(p.rho_ddot(0.0)) < 1e-12);
    CHECK(std::abs(p.rho_ddot(100.0)) < 1e-12);
    const double w02 = p.omega0() * p.omega0();
    for (int k = 0; k <= 100; ++k) CHECK(p.ermakov_residual(k) < 1e-9 * w02);
  }
  SUBCASE("zero extras equal the standard protocol") {
    const double z[2] = {0.0, 0.0};
    const auto a = make_ho_protocol(test::fig3_family(), {});
    const auto b = make_ho_protocol(test::fig3_family(), z);
    for (double t : {0.0, 31.0, 64.0, 100.0}) CHECK(a.rho(t) == doctest::Approx(b.rho(t)).epsilon(1e-14));
  }
  SUBCASE("a vanishing inner polynomial is rejected") {
    const double r[1] = {1e4};
    try {
      make_ho_protocol(test::fig3_family(), r);
      FAIL("expected NonPositiveRho");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::non_positive_rho);
    }
  }
}

TEST_CASE("g-phase constraint") {
  const auto f = test::fig3_family();
  const auto standard = make_ho_protocol(f, {});
  const double r6[1] = {0.0};
  const auto same = constrain_g_phase(f, standard.g(), r6);
  CHECK(std::abs(same.free_coefficients().at(1)) < 1e-9);

  const auto p = constrain_g_phase(f, 50.5, r6);
  CHECK(std::abs(p.g() - 50.5) < 1e-6 * 50.5);

  const double r6b[1] = {12.0};
  const auto q = constrain_g_phase(f, 50.5, r6b);
  CHECK(std::abs(q.g() - 50.5) < 1e-6 * 50.5);
  CHECK(q.free_coefficients().at(0) == 12.0);

  try {
    constrain_g_phase(f, 1e-3, r6);
    FAIL("expected NoRoot");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::no_root);
  }
}

TEST_CASE("constant-mu reference protocol") {
  const double w0 = units::mhz_to_angular(2.53), tf = 10.0;
  const auto p = make_constant_mu_protocol(w0, w0 / 100.0, tf);
  CHECK(p.mu() == doctest::Approx(-99.0 / (w0 * tf)).epsilon(1e-13));
  CHECK(p.omega(tf) / w0 == doctest::Approx(0.01).epsilon(1e-13));
  CHECK(p.omega(tf / 2) == doctest::Approx(w0 / 50.5).epsilon(1e-13));
  for (double t : {0.0, 1.0, 4.2, 9.9}) {
    const double w = p.omega(t);
    CHECK(std::abs(p.omega_dot(t) / (w * w) - p.mu()) < 1e-12 * std::abs(p.mu()));
  }
  const auto flat = make_constant_mu_protocol(w0, w0, tf);
  CHECK(flat.mu() == 0.0);
  CHECK(flat.omega(3.0) == w0);
}

TEST_CASE("random families keep their boundary constraints") {
  std::mt19937 rng(5);
  for (int k = 0; k < 100; ++k) {
    const auto t = test::random_tls(rng);
    CHECK(t.G_poly().max_constraint_residual() < 1e-10);
    CHECK(t.B_poly().max_constraint_residual() < 1e-10);
    const auto h = test::random_ho(rng, k % 2 ? RhoForm::sqrt_poly : RhoForm::inverse_sqrt_poly);
    CHECK(h.P().max_constraint_residual() < 1e-10);
  }
}

TEST_CASE("Ermakov round trip: integrating the derived trap reproduces rho") {
  std::mt19937 rng(8);
  for (int k = 0; k < 6; ++k) {
    const auto p = test::random_ho(rng, k % 2 ? RhoForm::sqrt_poly : RhoForm::inverse_sqrt_poly);
    const double w02 = p.omega0() * p.omega0();
    Dopri5<Eigen::Vector2d> ode(
        [&](double t, const Eigen::Vector2d& y) {
          return Eigen::Vector2d(y(1), w02 / std::pow(y(0), 3) - p.omega2(t) * y(0));
        },
        OdeOptions{1e-12, 1e-14});
    const auto times = std::vector<double>{0.25 * p.t_f(), 0.5 * p.t_f(), 0.75 * p.t_f(), p.t_f()};
    ode.integrate(Eigen::Vector2d(1.0, 0.0), 0.0, std::span<const double>(times),
                  [&](std::size_t, double t, const Eigen::Vector2d& y) {
                    CHECK(std::abs(y(0) - p.rho(t)) < 1e-6 * p.rho(t));
                  });
  }
}

TEST_CASE("the phase integral is converged on the default grid") {
  for (auto f : {test::fig3_family(), test::fig4_family()}) {
    const auto a = make_ho_protocol(f, {});
    f.grid = 2 * f.grid - 1;
    const auto b = make_ho_protocol(f, {});
    CHECK(std::abs(a.g() - b.g()) < 1e-8 * b.g());
  }
}
