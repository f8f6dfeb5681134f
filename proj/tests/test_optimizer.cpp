#include "doctest.h"

#include <atomic>
#include <cmath>
#include <limits>

#include "nrc/error.hpp"
#include "nrc/measures.hpp"
#include "nrc/optimizer.hpp"
#include "nrc/protocols.hpp"
#include "test_util.hpp"

using namespace nrc;

TEST_CASE("scan grid layout") {
  CHECK(scan_points({}).size() == 1);
  CHECK(scan_points({}).front().empty());
  const ScanAxis axes[2] = {{"a", 0, 1, 3}, {"b", -1, 1, 2}};
  const auto pts = scan_points(axes);
  REQUIRE(pts.size() == 6);
  CHECK(pts[0] == std::vector<double>{0, -1});
  CHECK(pts[1] == std::vector<double>{0, 1});
  CHECK(pts[5] == std::vector<double>{1, 1});
  const ScanAxis one[1] = {{"c", 2.5, 2.5, 1}};
  CHECK(scan_points(one).front().front() == 2.5);
}

TEST_CASE("scan rows come back in grid order for any worker count") {
  const ScanAxis axes[1] = {{"g4", -9, 9, 41}};
  auto eval = [](std::span<const double> x) {
    const auto p = make_tls_protocol(10.0, 0.5, x, {}, 401);
    return std::vector<double>{closed_form_O_z([&](double t) { return p.G(t); }, p.t_f(), 401)};
  };
  const auto a = scan(axes, eval, 1);
  const auto b = scan(axes, eval, 4);
  REQUIRE(a.size() == 41);
  double lo = 1e9, hi = -1e9;
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].index == i);
    CHECK(b[i].index == i);
    CHECK(a[i].values == b[i].values);
    lo = std::min(lo, a[i].values[0]);
    hi = std::max(hi, a[i].values[0]);
  }
  CHECK(hi - lo > 0.01);  // nondegenerate spread of O_z
}

TEST_CASE("failed cells are recorded, not thrown") {
  const ScanAxis axes[1] = {{"x", 0, 2, 3}};
  const auto rows = scan(axes, [](std::span<const double> x) -> std::vector<double> {
    if (x[0] == 1.0) throw Error(ErrorKind::no_root, "boom");
    return {x[0]};
  });
  CHECK(rows[0].ok());
  CHECK(!rows[1].ok());
  CHECK(rows[1].error.find("NoRoot") != std::string::npos);
  CHECK(rows[2].values[0] == 2.0);
}

TEST_CASE("parallel_for visits every index once") {
  std::vector<std::atomic<int>> hits(100);
  parallel_for(100, [&](std::size_t i) { hits[i]++; }, 3);
  for (auto& h : hits) CHECK(h.load() == 1);
  CHECK(default_workers() >= 1);
}

TEST_CASE("Nelder-Mead") {
  SUBCASE("convex quadratic") {
    const auto r = minimize(
        [](std::span<const double> x) { return (x[0] - 1.5) * (x[0] - 1.5) + 3 * (x[1] + 0.25) * (x[1] + 0.25) + 2; },
        {0.0, 0.0}, NelderMeadOptions{0.5, 1e-9, 2000, {}});
    CHECK(std::abs(r.x[0] - 1.5) < 1e-6);
    CHECK(std::abs(r.x[1] + 0.25) < 1e-6);
    CHECK(r.value <= r.initial_value);
  }
  SUBCASE("never worse than the start, deterministic") {
    auto f = [](std::span<const double> x) { return std::sin(3 * x[0]) + std::cos(2 * x[1]) + 0.1 * x[0] * x[1]; };
    const auto a = minimize(f, {0.3, -0.2});
    const auto b = minimize(f, {0.3, -0.2});
    CHECK(a.value <= a.initial_value);
    CHECK(a.x == b.x);
    CHECK(a.iterations == b.iterations);
  }
  SUBCASE("non-finite start") {
    CHECK_THROWS_AS(minimize([](std::span<const double>) { return std::nan(""); }, std::vector<double>{0.0}), Error);
  }
}

TEST_CASE("minimizing O_z over two extra coefficients beats the standard protocol") {
  auto oz = [](std::span<const double> g) {
    try {
      const auto p = make_tls_protocol(10.0, 0.5, g, {}, 401);
      return closed_form_O_z([&](double t) { return p.G(t); }, p.t_f(), 401);
    } catch (const Error&) {
      return std::numeric_limits<double>::infinity();
    }
  };
  const double standard = oz(std::vector<double>{0.0, 0.0});
  const auto r = minimize(oz, {0.0, 0.0}, NelderMeadOptions{1.0, 1e-6, 300, {}});
  CHECK(r.value < standard);

  // started from the best scan cell, the minimizer does not end above it
  const ScanAxis axes[1] = {{"g4", -9, 9, 19}};
  const auto rows = scan(axes, [&](std::span<const double> x) {
    return std::vector<double>{oz(std::vector<double>{x[0], 0.0})};
  });
  std::size_t best = 0;
  for (std::size_t i = 0; i < rows.size(); ++i)
    if (rows[i].values[0] < rows[best].values[0]) best = i;
  const auto s = minimize(oz, {rows[best].coeffs[0], 0.0}, NelderMeadOptions{1.0, 1e-6, 300, {}});
  CHECK(s.value <= rows[best].values[0]);
}

TEST_CASE("constrained minimization of S0 at fixed g") {
  const auto f = test::fig3_family();
  const auto s0 = [](const HoProtocol& p) { return ho_overlap_Sn(p, 0); };
  const double r6[1] = {0.0};
  const auto standard = constrain_g_phase(f, 50.5, r6);
  NelderMeadOptions o;
  o.initial_step = 5.0;
  o.max_iter = 60;
  std::size_t calls = 0;
  const auto r = constrained_minimize(
      [&](const HoProtocol& p) {
        ++calls;
        CHECK(std::abs(p.g() - 50.5) < 1e-6 * 50.5);
        return s0(p);
      },
      f, 50.5, 0.0, o);
  CHECK(calls > 0);
  CHECK(r.value < s0(standard));
  CHECK(r.value <= r.initial_value);
  CHECK(std::abs(r.protocol.g() - 50.5) < 1e-6 * 50.5);

  CHECK_THROWS_AS(constrained_minimize(s0, f, 1e-3, 0.0, o), Error);
}
