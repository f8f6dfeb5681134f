#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace nrc::quad {

// Uniform grid of n points on [a, b] (n >= 2).
std::vector<double> uniform_grid(double a, double b, std::size_t n);

// Composite Simpson rule on uniformly spaced samples.  An even number of
// intervals is required; for an odd count the last interval is closed with
// a 3/8 rule over the trailing three intervals.
double simpson(std::span<const double> values, double h);

// Convenience: sample f on a uniform grid of n points and integrate.
double simpson(const std::function<double(double)>& f, double a, double b, std::size_t n);

struct Rule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

// Gauss-Legendre rule on [-1, 1] (Golub-Welsch).
Rule gauss_legendre(std::size_t n);

// Gauss-Hermite rule for weight exp(-x^2) (Golub-Welsch).  The nodes are the
// roots of the physicists' Hermite polynomial H_n.
Rule gauss_hermite(std::size_t n);

// Integrate f over [a, b] with an n-point Gauss-Legendre rule.
double gauss_legendre_integrate(const std::function<double(double)>& f, double a, double b,
                                const Rule& rule);

}  // namespace nrc::quad
