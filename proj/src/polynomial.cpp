#include "nrc/polynomial.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "nrc/error.hpp"

namespace nrc {

namespace {

// d^k/dx^k x^i = falling(i, k) x^(i-k)
double falling(std::size_t i, unsigned k) {
  double r = 1.0;
  for (unsigned j = 0; j < k; ++j) r *= static_cast<double>(i - j);
  return r;
}

}  // namespace

Polynomial::Polynomial(std::vector<double> coefficients) : coeffs_(std::move(coefficients)) {}

double Polynomial::derivative_at(double x, unsigned k) const noexcept {
  const std::size_t n = coeffs_.size();
  if (n <= k) return 0.0;
  double acc = 0.0;
  for (std::size_t i = n; i-- > k;) acc = acc * x + coeffs_[i] * falling(i, k);
  return acc;
}

Polynomial Polynomial::derivative(unsigned k) const {
  if (coeffs_.size() <= k) return Polynomial({0.0});
  std::vector<double> c(coeffs_.size() - k);
  for (std::size_t i = k; i < coeffs_.size(); ++i) c[i - k] = coeffs_[i] * falling(i, k);
  return Polynomial(std::move(c));
}

Polynomial Polynomial::antiderivative() const {
  std::vector<double> c(coeffs_.size() + 1, 0.0);
  for (std::size_t i = 0; i < coeffs_.size(); ++i) c[i + 1] = coeffs_[i] / static_cast<double>(i + 1);
  return Polynomial(std::move(c));
}

Polynomial Polynomial::taylor_shift(double x0) const {
  std::vector<double> c(coeffs_.size());
  double fact = 1.0;
  for (unsigned k = 0; k < coeffs_.size(); ++k) {
    if (k > 0) fact *= static_cast<double>(k);
    c[k] = derivative_at(x0, k) / fact;
  }
  return Polynomial(std::move(c));
}

double Polynomial::increment_from(double x0, double x) const {
  const Polynomial shifted = taylor_shift(x0);
  const auto& c = shifted.coeffs_;
  const double u = x - x0;
  double acc = 0.0;
  for (std::size_t i = c.size(); i-- > 1;) acc = (acc + c[i]) * u;
  return acc;
}

BoundaryPolynomial::BoundaryPolynomial(std::vector<PolynomialConstraint> constraints,
                                       std::size_t degree, std::vector<std::size_t> free_indices,
                                       std::vector<double> free_values)
    : constraints_(std::move(constraints)), degree_(degree), free_indices_(std::move(free_indices)) {
  const std::size_t n = degree + 1;
  if (free_indices_.size() != free_values.size())
    throw Error(ErrorKind::invalid_argument, "free index/value count mismatch");
  if (constraints_.size() + free_indices_.size() != n)
    throw Error(ErrorKind::invalid_argument,
                "constraints (" + std::to_string(constraints_.size()) + ") + free slots (" +
                    std::to_string(free_indices_.size()) + ") must equal degree+1 (" +
                    std::to_string(n) + ")");
  std::vector<bool> is_free(n, false);
  for (std::size_t idx : free_indices_) {
    if (idx >= n || is_free[idx])
      throw Error(ErrorKind::invalid_argument, "free index out of range or repeated");
    is_free[idx] = true;
  }
  std::vector<std::size_t> solved;
  for (std::size_t i = 0; i < n; ++i)
    if (!is_free[i]) solved.push_back(i);

  std::vector<double> coeffs(n, 0.0);
  for (std::size_t j = 0; j < free_indices_.size(); ++j) coeffs[free_indices_[j]] = free_values[j];

  const auto m = static_cast<Eigen::Index>(solved.size());
  if (m > 0) {
    Eigen::MatrixXd A(m, m);
    Eigen::VectorXd rhs(m);
    for (Eigen::Index r = 0; r < m; ++r) {
      const auto& c = constraints_[static_cast<std::size_t>(r)];
      double known = 0.0;
      for (std::size_t idx : free_indices_) {
        if (idx >= c.order)
          known += coeffs[idx] * falling(idx, c.order) * std::pow(c.at, static_cast<double>(idx - c.order));
      }
      rhs(r) = c.value - known;
      for (Eigen::Index col = 0; col < m; ++col) {
        const std::size_t i = solved[static_cast<std::size_t>(col)];
        A(r, col) = i >= c.order ? falling(i, c.order) * std::pow(c.at, static_cast<double>(i - c.order)) : 0.0;
      }
    }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(A);
    lu.setThreshold(1e-12);
    if (lu.rank() < m)
      throw Error(ErrorKind::singular_interpolation, "constraint system is singular");
    const Eigen::VectorXd x = lu.solve(rhs);
    for (Eigen::Index col = 0; col < m; ++col) coeffs[solved[static_cast<std::size_t>(col)]] = x(col);
  }
  poly_ = Polynomial(std::move(coeffs));
}

double BoundaryPolynomial::max_constraint_residual() const {
  double worst = 0.0;
  for (const auto& c : constraints_) {
    const double r = std::abs(poly_.derivative_at(c.at, c.order) - c.value) / std::max(1.0, std::abs(c.value));
    worst = std::max(worst, r);
  }
  return worst;
}

BoundaryPolynomial solve_boundary_polynomial(std::vector<PolynomialConstraint> constraints,
                                             std::size_t degree,
                                             std::span<const double> free_values) {
  const std::size_t nc = constraints.size();
  if (nc + free_values.size() != degree + 1)
    throw Error(ErrorKind::invalid_argument, "degree does not match constraints plus free values");
  std::vector<std::size_t> idx(free_values.size());
  std::iota(idx.begin(), idx.end(), nc);
  return BoundaryPolynomial(std::move(constraints), degree, std::move(idx),
                            std::vector<double>(free_values.begin(), free_values.end()));
}

}  // namespace nrc
