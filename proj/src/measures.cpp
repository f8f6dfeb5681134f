#include "nrc/measures.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "nrc/error.hpp"
#include "nrc/quadrature.hpp"

namespace nrc {

namespace {

constexpr double sqrt2 = std::numbers::sqrt2;

// Simpson average of f over [0, t_f] on n points.
double time_average(const std::function<double(double)>& f, double t_f, std::size_t n) {
  n = std::max<std::size_t>(n, 3);
  const auto t = quad::uniform_grid(0.0, t_f, n);
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = f(t[i]);
  return quad::simpson(v, 1.0 / static_cast<double>(n - 1));
}

double hermite(unsigned n, double y) {
  if (n == 0) return 1.0;
  double h0 = 1.0, h1 = 2.0 * y;
  for (unsigned k = 1; k < n; ++k) {
    const double h2 = 2.0 * y * h1 - 2.0 * k * h0;
    h0 = h1;
    h1 = h2;
  }
  return h1;
}

}  // namespace

double overlap_bound(std::size_t n) {
  if (n == 2) return 2.0 * sqrt2 - 2.0;
  return static_cast<double>(n * n - n);
}

CMatrix overlap_matrix(const CMatrix& I_vectors, const CMatrix& X_vectors) {
  if (I_vectors.rows() != X_vectors.rows() || I_vectors.cols() != X_vectors.cols())
    throw Error(ErrorKind::dimension_mismatch, "bases differ in dimension");
  return I_vectors.adjoint() * X_vectors;
}

double overlap_excess(const CMatrix& I_vectors, const CMatrix& X_vectors) {
  return overlap_matrix(I_vectors, X_vectors).cwiseAbs().sum() - static_cast<double>(I_vectors.cols());
}

CMatrix eigenvectors(const CMatrix& A, const CMatrix* previous) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(0.5 * (A + A.adjoint()));
  const auto& ev = es.eigenvalues();
  const double scale = std::max(ev.cwiseAbs().maxCoeff(), 1e-300);
  for (Eigen::Index i = 1; i < ev.size(); ++i)
    if (ev(i) - ev(i - 1) <= 1e-12 * scale)
      throw Error(ErrorKind::degenerate_spectrum, "degenerate spectrum");
  CMatrix V = es.eigenvectors();
  if (previous != nullptr && previous->rows() == V.rows()) {
    for (Eigen::Index j = 0; j < V.cols(); ++j) {
      const cplx ov = previous->col(j).dot(V.col(j));
      if (std::abs(ov) > 0.0) V.col(j) *= std::conj(ov) / std::abs(ov);
    }
  }
  return V;
}

double measure_O(const std::function<CMatrix(double)>& invariant, const CMatrix& X, double t_f,
                 std::size_t grid) {
  Eigen::SelfAdjointEigenSolver<CMatrix> ex(0.5 * (X + X.adjoint()));
  const CMatrix xv = ex.eigenvectors();
  CMatrix prev;
  bool have_prev = false;
  return time_average(
      [&](double t) {
        CMatrix v = eigenvectors(invariant(t), have_prev ? &prev : nullptr);
        prev = v;
        have_prev = true;
        return overlap_excess(v, xv);
      },
      t_f, grid);
}

double measure_A(const std::function<CMatrix(double)>& invariant, const CMatrix& X, double t_f,
                 std::size_t grid) {
  const double num = time_average(
      [&](double t) {
        const CMatrix I = invariant(t);
        return (X * I - I * X).norm();
      },
      t_f, grid);
  const double den = time_average([&](double t) { return (X * invariant(t)).norm(); }, t_f, grid);
  if (den == 0.0) throw Error(ErrorKind::zero_normalizer, "int ||X I|| dt vanishes");
  return num / (2.0 * den);
}

double closed_form_O_z(const std::function<double(double)>& G, double t_f, std::size_t grid) {
  return time_average(
      [&](double t) {
        const double g = G(t);
        return 2.0 * (std::abs(std::sin(0.5 * g)) + std::abs(std::cos(0.5 * g)) - 1.0);
      },
      t_f, grid);
}

double closed_form_A_z(const std::function<double(double)>& G, double t_f, std::size_t grid) {
  return time_average([&](double t) { return std::abs(std::sin(G(t))); }, t_f, grid);
}

double closed_form_O_x(const std::function<double(double)>& G, const std::function<double(double)>& B,
                       double t_f, std::size_t grid) {
  return time_average(
      [&](double t) {
        const double c = std::cos(B(t)) * std::sin(G(t));
        return 2.0 * (std::sqrt(std::max(0.0, 0.5 * (1.0 - c))) + std::sqrt(std::max(0.0, 0.5 * (1.0 + c))) - 1.0);
      },
      t_f, grid);
}

double weighted_average(std::span<const double> measures, std::span<const double> strengths) {
  if (measures.size() != strengths.size())
    throw Error(ErrorKind::dimension_mismatch, "measure and strength counts differ");
  double total = 0.0;
  for (double e : strengths) total += e;
  if (!(total > 0.0)) throw Error(ErrorKind::all_zero_strengths, "noise strengths sum to zero");
  double acc = 0.0;
  for (std::size_t i = 0; i < measures.size(); ++i) acc += strengths[i] / total * measures[i];
  return acc;
}

MeasureReport tls_measures(const TlsProtocol& p, double eta_z, double eta_x, std::size_t grid) {
  MeasureReport r;
  r.n = 2;
  r.O_max = overlap_bound(2);
  auto G = [&p](double t) { return p.G(t); };
  auto B = [&p](double t) { return p.B(t); };
  const double oz = closed_form_O_z(G, p.t_f(), grid);
  const double ox = closed_form_O_x(G, B, p.t_f(), grid);
  const double az = closed_form_A_z(G, p.t_f(), grid);
  const double ax = measure_A([&p](double t) { return CMatrix(p.invariant(t)); }, sigma_x(), p.t_f(), grid);
  r.O = {oz, ox};
  r.A = {az, ax};
  const double etas[2] = {eta_z, eta_x};
  if (eta_z + eta_x > 0.0) {
    r.O_bar = weighted_average(r.O, etas);
    r.A_bar = weighted_average(r.A, etas);
  }
  return r;
}

double hermite_abs_integral(unsigned n) {
  // |H_n| is even: integrate over [0, inf) panel by panel between roots.
  std::vector<double> cuts{0.0};
  if (n > 0) {
    const auto roots = quad::gauss_hermite(n).nodes;
    for (double r : roots)
      if (r > 1e-12) cuts.push_back(r);
  }
  const double last = cuts.back();
  for (int k = 1; k <= 16; ++k) cuts.push_back(last + k);
  const auto rule = quad::gauss_legendre(40);
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
    acc += std::abs(quad::gauss_legendre_integrate(
        [n](double y) { return std::exp(-0.5 * y * y) * hermite(n, y); }, cuts[i], cuts[i + 1], rule));
  return 2.0 * acc;
}

double ho_overlap_Sn(const std::function<double(double)>& rho, unsigned n, double mass, double omega0,
                     double t_f, std::size_t grid) {
  double log_norm = 0.5 * n * std::log(2.0) + 0.5 * std::lgamma(n + 1.0);
  const double cn = std::pow(std::numbers::pi, -0.25) * std::pow(mass * omega0, -0.25) *
                    hermite_abs_integral(n) * std::exp(-log_norm);
  const double avg = time_average(
      [&](double t) {
        const double r = rho(t);
        if (!(r > 0.0)) throw Error(ErrorKind::non_positive_rho, "scaling function must be positive");
        return std::sqrt(r);
      },
      t_f, grid);
  return cn * avg;
}

double ho_overlap_Sn(const HoProtocol& p, unsigned n) {
  return ho_overlap_Sn([&p](double t) { return p.rho(t); }, n, p.mass(), p.omega0(), p.t_f(), p.family().grid);
}

double average_power(std::span<const double> times, std::span<const double> q2,
                     const std::function<double(double)>& omega2_dot, double mass) {
  if (times.size() != q2.size() || times.size() < 2)
    throw Error(ErrorKind::dimension_mismatch, "power needs matching time and <q^2> samples");
  const double span = times.back() - times.front();
  std::vector<double> v(times.size());
  for (std::size_t i = 0; i < times.size(); ++i) v[i] = 0.5 * mass * omega2_dot(times[i]) * q2[i];
  return quad::simpson(v, span / static_cast<double>(times.size() - 1)) / span;
}

CMatrix bloch_basis(double theta, double phi) {
  CMatrix v(2, 2);
  const cplx e = std::polar(1.0, phi);
  v(0, 0) = std::cos(0.5 * theta);
  v(1, 0) = e * std::sin(0.5 * theta);
  v(0, 1) = -std::conj(e) * std::sin(0.5 * theta);
  v(1, 1) = std::cos(0.5 * theta);
  return v;
}

Landscape overlap_landscape(double p, std::size_t n_theta, std::size_t n_phi) {
  if (!(p >= 0.0 && p <= 1.0)) throw Error(ErrorKind::invalid_argument, "weight must lie in [0, 1]");
  Landscape L;
  L.theta = quad::uniform_grid(0.0, std::numbers::pi, n_theta);
  L.phi = quad::uniform_grid(0.0, 2.0 * std::numbers::pi, n_phi);
  L.value.resize(static_cast<Eigen::Index>(n_theta), static_cast<Eigen::Index>(n_phi));
  const CMatrix zb = CMatrix::Identity(2, 2);
  Eigen::SelfAdjointEigenSolver<CMatrix> ex{CMatrix(sigma_x())};
  const CMatrix xb = ex.eigenvectors();
  L.min_value = std::numeric_limits<double>::infinity();
  L.max_value = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n_theta; ++i)
    for (std::size_t j = 0; j < n_phi; ++j) {
      const CMatrix b = bloch_basis(L.theta[i], L.phi[j]);
      const double v = p * overlap_matrix(b, zb).cwiseAbs().sum() + (1.0 - p) * overlap_matrix(b, xb).cwiseAbs().sum();
      L.value(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v;
      if (v < L.min_value) { L.min_value = v; L.theta_min = L.theta[i]; L.phi_min = L.phi[j]; }
      if (v > L.max_value) { L.max_value = v; L.theta_max = L.theta[i]; L.phi_max = L.phi[j]; }
    }
  return L;
}

double landscape_minimum(double p) {
  return 2.0 * sqrt2 * std::min(p, 1.0 - p) + 2.0 * std::max(p, 1.0 - p);
}

}  // namespace nrc
