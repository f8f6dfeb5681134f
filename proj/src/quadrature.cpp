#include "nrc/quadrature.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "nrc/error.hpp"

namespace nrc::quad {

std::vector<double> uniform_grid(double a, double b, std::size_t n) {
  if (n < 2) throw Error(ErrorKind::invalid_argument, "uniform_grid needs at least 2 points");
  std::vector<double> t(n);
  const double h = (b - a) / static_cast<double>(n - 1);
  for (std::size_t i = 0; i < n; ++i) t[i] = a + h * static_cast<double>(i);
  t.back() = b;
  return t;
}

double simpson(std::span<const double> v, double h) {
  const std::size_t n = v.size();
  if (n < 2) return 0.0;
  if (n == 2) return 0.5 * h * (v[0] + v[1]);
  if (n == 3) return h / 3.0 * (v[0] + 4.0 * v[1] + v[2]);
  const std::size_t intervals = n - 1;
  std::size_t simpson_end = intervals;  // index of last point covered by Simpson
  double tail = 0.0;
  if (intervals % 2 == 1) {
    simpson_end = intervals - 3;
    const std::size_t k = simpson_end;
    tail = 3.0 * h / 8.0 * (v[k] + 3.0 * v[k + 1] + 3.0 * v[k + 2] + v[k + 3]);
  }
  double s = v[0] + v[simpson_end];
  for (std::size_t i = 1; i < simpson_end; ++i) s += (i % 2 == 1 ? 4.0 : 2.0) * v[i];
  return h / 3.0 * s + tail;
}

double simpson(const std::function<double(double)>& f, double a, double b, std::size_t n) {
  const auto t = uniform_grid(a, b, n);
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = f(t[i]);
  return simpson(v, (b - a) / static_cast<double>(n - 1));
}

namespace {

// Golub-Welsch: symmetric tridiagonal Jacobi matrix with zero diagonal.
Rule golub_welsch(std::size_t n, const std::function<double(std::size_t)>& offdiag, double mu0) {
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t k = 1; k < n; ++k) {
    const double b = offdiag(k);
    J(static_cast<Eigen::Index>(k - 1), static_cast<Eigen::Index>(k)) = b;
    J(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k - 1)) = b;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
  Rule r;
  r.nodes.resize(n);
  r.weights.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto ii = static_cast<Eigen::Index>(i);
    r.nodes[i] = es.eigenvalues()(ii);
    const double v0 = es.eigenvectors()(0, ii);
    r.weights[i] = mu0 * v0 * v0;
  }
  return r;
}

}  // namespace

Rule gauss_legendre(std::size_t n) {
  if (n == 0) throw Error(ErrorKind::invalid_argument, "gauss_legendre: n must be positive");
  return golub_welsch(
      n,
      [](std::size_t k) {
        const double kk = static_cast<double>(k);
        return kk / std::sqrt(4.0 * kk * kk - 1.0);
      },
      2.0);
}

Rule gauss_hermite(std::size_t n) {
  if (n == 0) throw Error(ErrorKind::invalid_argument, "gauss_hermite: n must be positive");
  return golub_welsch(
      n, [](std::size_t k) { return std::sqrt(static_cast<double>(k) / 2.0); },
      std::sqrt(std::numbers::pi));
}

double gauss_legendre_integrate(const std::function<double(double)>& f, double a, double b,
                                const Rule& rule) {
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (a + b);
  double s = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) s += rule.weights[i] * f(mid + half * rule.nodes[i]);
  return half * s;
}

}  // namespace nrc::quad
