#pragma once

#include <cmath>
#include <random>
#include <vector>

#include "nrc/error.hpp"
#include "nrc/protocols.hpp"

namespace nrc::test {

inline constexpr double sqrt2 = 1.4142135623730951;
inline constexpr double o_max = 2.0 * sqrt2 - 2.0;

inline double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

// Random admissible two-level protocol; retries on rejected coefficient sets.
inline TlsProtocol random_tls(std::mt19937& rng, std::size_t n_extra = 2, double scale = 4.0) {
  std::uniform_real_distribution<double> u(-scale, scale);
  for (;;) {
    std::vector<double> g(n_extra), b(n_extra);
    for (auto& x : g) x = u(rng);
    for (auto& x : b) x = 0.5 * u(rng);
    BSpec bs;
    bs.extra = b;
    try {
      return make_tls_protocol(10.0, 0.5, g, bs, 401);
    } catch (const Error&) {
    }
  }
}

inline HoFamily fig3_family(double t_f = 100.0) {
  HoFamily f;
  f.omega0 = units::mhz_to_angular(15.92);
  f.omega_f = f.omega0 / 100.0;
  f.t_f = t_f;
  f.form = RhoForm::inverse_sqrt_poly;
  return f;
}

inline HoFamily fig4_family(double t_f = 10.0) {
  HoFamily f;
  f.omega0 = units::mhz_to_angular(2.53);
  f.omega_f = f.omega0 / 100.0;
  f.t_f = t_f;
  f.form = RhoForm::sqrt_poly;
  return f;
}

// Random admissible oscillator protocol of either form.
inline HoProtocol random_ho(std::mt19937& rng, RhoForm form) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::uniform_real_distribution<double> tf(5.0, 100.0);
  for (;;) {
    HoFamily f = form == RhoForm::inverse_sqrt_poly ? fig3_family(tf(rng)) : fig4_family(tf(rng));
    const double s = form == RhoForm::inverse_sqrt_poly ? 5.0 : 500.0;
    std::vector<double> r = {s * u(rng), s * u(rng)};
    try {
      return make_ho_protocol(f, r);
    } catch (const Error&) {
    }
  }
}

}  // namespace nrc::test
