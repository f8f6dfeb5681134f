#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace nrc {

// Real polynomial with coefficients in ascending degree.
class Polynomial {
 public:
  Polynomial() = default;
  explicit Polynomial(std::vector<double> coefficients);

  const std::vector<double>& coefficients() const noexcept { return coeffs_; }
  std::size_t degree() const noexcept { return coeffs_.empty() ? 0 : coeffs_.size() - 1; }

  double operator()(double x) const noexcept { return derivative_at(x, 0); }

  // k-th derivative evaluated at x (Horner on the differentiated coefficients).
  double derivative_at(double x, unsigned k) const noexcept;

  Polynomial derivative(unsigned k = 1) const;
  Polynomial antiderivative() const;

  // Coefficients of the same polynomial expanded in powers of (x - x0).
  Polynomial taylor_shift(double x0) const;

  // p(x) - p(x0) evaluated through the Taylor expansion at x0, which keeps
  // full relative precision when x is close to x0.
  double increment_from(double x0, double x) const;

 private:
  std::vector<double> coeffs_;
};

struct PolynomialConstraint {
  double at = 0.0;
  unsigned order = 0;  // derivative order
  double value = 0.0;
};

// Polynomial whose coefficients are partly fixed by value/derivative
// constraints and partly left free.  Constraints plus free slots must add
// up to degree + 1.
class BoundaryPolynomial {
 public:
  BoundaryPolynomial(std::vector<PolynomialConstraint> constraints, std::size_t degree,
                     std::vector<std::size_t> free_indices, std::vector<double> free_values);

  const Polynomial& polynomial() const noexcept { return poly_; }
  const std::vector<double>& coefficients() const noexcept { return poly_.coefficients(); }
  const std::vector<PolynomialConstraint>& constraints() const noexcept { return constraints_; }
  const std::vector<std::size_t>& free_indices() const noexcept { return free_indices_; }
  std::size_t degree() const noexcept { return degree_; }

  double operator()(double x) const noexcept { return poly_(x); }
  double derivative_at(double x, unsigned k) const noexcept { return poly_.derivative_at(x, k); }

  // Largest constraint residual, relative to max(1, |value|).
  double max_constraint_residual() const;

 private:
  std::vector<PolynomialConstraint> constraints_;
  std::size_t degree_;
  std::vector<std::size_t> free_indices_;
  Polynomial poly_;
};

// Convenience for the common layout: constraints fill the lowest slots and the
// free values are the coefficients of degrees n_constraints, n_constraints+1, ...
BoundaryPolynomial solve_boundary_polynomial(std::vector<PolynomialConstraint> constraints,
                                             std::size_t degree,
                                             std::span<const double> free_values);

}  // namespace nrc
