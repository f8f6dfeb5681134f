#include "nrc/algebra.hpp"

#include <algorithm>
#include <cmath>

#include "nrc/error.hpp"

namespace nrc {

namespace {

LieAlgebraSpec make_spec(std::size_t n) {
  LieAlgebraSpec s;
  s.dimension = n;
  s.kappa.assign(n * n * n, 0.0);
  return s;
}

void set_pair(LieAlgebraSpec& s, std::size_t a, std::size_t b, std::size_t c, double k) {
  s.kappa[(a * s.dimension + b) * s.dimension + c] = k;
  s.kappa[(a * s.dimension + c) * s.dimension + b] = -k;
}

}  // namespace

void LieAlgebraSpec::validate() const {
  if (kappa.size() != dimension * dimension * dimension)
    throw Error(ErrorKind::invalid_argument, "structure constant array has wrong size");
  for (std::size_t a = 0; a < dimension; ++a)
    for (std::size_t b = 0; b < dimension; ++b)
      for (std::size_t c = 0; c < dimension; ++c)
        if (std::abs(kappa_at(a, b, c) + kappa_at(a, c, b)) > 1e-14)
          throw Error(ErrorKind::invalid_argument, "structure constants are not antisymmetric");
}

LieAlgebraSpec su2_spec() {
  // [T1,T2] = iT3 and cyclic
  auto s = make_spec(3);
  set_pair(s, 2, 0, 1, 1.0);
  set_pair(s, 0, 1, 2, 1.0);
  set_pair(s, 1, 2, 0, 1.0);
  return s;
}

LieAlgebraSpec su11_spec() {
  // [T1,T2] = -iT3, [T1,T3] = -2iT1, [T2,T3] = 2iT2
  auto s = make_spec(3);
  set_pair(s, 2, 0, 1, -1.0);
  set_pair(s, 0, 0, 2, -2.0);
  set_pair(s, 1, 1, 2, 2.0);
  return s;
}

double structure_residual(const LieAlgebraSpec& spec, std::span<const CMatrix> generators) {
  if (generators.size() != spec.dimension)
    throw Error(ErrorKind::dimension_mismatch, "generator count differs from algebra dimension");
  double worst = 0.0;
  for (std::size_t b = 0; b < spec.dimension; ++b)
    for (std::size_t c = 0; c < spec.dimension; ++c) {
      CMatrix lhs = generators[b] * generators[c] - generators[c] * generators[b];
      for (std::size_t a = 0; a < spec.dimension; ++a) lhs -= spec.alpha(a, b, c) * generators[a];
      worst = std::max(worst, lhs.cwiseAbs().maxCoeff());
    }
  return worst;
}

RMatrix build_coupling_matrix(const LieAlgebraSpec& spec, std::span<const double> f) {
  if (f.size() != spec.dimension)
    throw Error(ErrorKind::dimension_mismatch, "coefficient vector length differs from algebra dimension");
  const auto n = static_cast<Eigen::Index>(spec.dimension);
  RMatrix G = RMatrix::Zero(n, n);
  for (std::size_t a = 0; a < spec.dimension; ++a)
    for (std::size_t b = 0; b < spec.dimension; ++b) {
      double acc = 0.0;
      for (std::size_t c = 0; c < spec.dimension; ++c) acc += spec.kappa_at(a, b, c) * f[c];
      G(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) = acc;
    }
  return G;
}

Eigen::Matrix2cd sigma_x() {
  Eigen::Matrix2cd m;
  m << 0, 1, 1, 0;
  return m;
}

Eigen::Matrix2cd sigma_y() {
  Eigen::Matrix2cd m;
  m << 0, cplx(0, -1), cplx(0, 1), 0;
  return m;
}

Eigen::Matrix2cd sigma_z() {
  Eigen::Matrix2cd m;
  m << 1, 0, 0, -1;
  return m;
}

Eigen::Matrix2cd su2_invariant_matrix(double G, double B, double omega_r) {
  const cplx e = std::polar(1.0, B);
  Eigen::Matrix2cd m;
  m << std::cos(G), std::sin(G) * e, std::sin(G) * std::conj(e), -std::cos(G);
  return omega_r * m;
}

Eigen::Matrix2cd tls_hamiltonian(double delta, double omega) {
  return 0.5 * delta * sigma_z() + 0.5 * omega * sigma_x();
}

TlsControls su2_controls_from_angles(double G, double G_dot, double B, double B_dot) {
  const double sb = std::sin(B);
  const double denom = std::tan(G) * std::tan(B);
  TlsControls c;
  if (G_dot == 0.0) {
    c.delta = -B_dot;
    c.omega = 0.0;
    return c;
  }
  if (sb == 0.0 || denom == 0.0 || !std::isfinite(denom))
    throw Error(ErrorKind::singular_control, "vanishing denominator with nonzero G'");
  c.delta = -B_dot + G_dot / denom;
  c.omega = G_dot / sb;
  if (!std::isfinite(c.delta) || !std::isfinite(c.omega))
    throw Error(ErrorKind::singular_control, "non-finite control value");
  return c;
}

Su2Components su2_components_from_angles(double G, double G_dot, double B, double B_dot,
                                         double omega_r) {
  const double sg = std::sin(G), cg = std::cos(G), sb = std::sin(B), cb = std::cos(B);
  Su2Components out;
  out.f = {omega_r * sg * cb, -omega_r * sg * sb, omega_r * cg};
  out.f_dot = {omega_r * (cg * cb * G_dot - sg * sb * B_dot),
               -omega_r * (cg * sb * G_dot + sg * cb * B_dot), -omega_r * sg * G_dot};
  return out;
}

TlsControls su2_controls_from_components(const std::array<double, 3>& f,
                                         const std::array<double, 3>& f_dot, double tolerance) {
  double dot = 0.0, nf = 0.0, nfd = 0.0;
  for (int i = 0; i < 3; ++i) {
    dot += f[i] * f_dot[i];
    nf += f[i] * f[i];
    nfd += f_dot[i] * f_dot[i];
  }
  const double scale = std::sqrt(nf * nfd);
  if (std::abs(dot) > tolerance * std::max(scale, 1e-300) && scale > 0.0)
    throw Error(ErrorKind::constraint_violated, "components leave the sphere f.f = c");
  if (f_dot[0] == 0.0 && f_dot[2] == 0.0) return {};
  if (f[1] == 0.0) throw Error(ErrorKind::singular_control, "f2 vanishes");
  return {-f_dot[0] / f[1], f_dot[2] / f[1]};
}

double omega_from_rho(double rho, double rho_ddot, double omega0) {
  if (!(rho > 0.0)) throw Error(ErrorKind::non_positive_rho, "scaling function must be positive");
  const double r2 = rho * rho;
  return omega0 * omega0 / (r2 * r2) - rho_ddot / rho;
}

double frictionless_residual(const CMatrix& H, const CMatrix& I) {
  if (H.rows() != I.rows() || H.cols() != I.cols() || H.rows() != H.cols())
    throw Error(ErrorKind::dimension_mismatch, "H and I must be square and of equal size");
  const double nh = H.norm(), ni = I.norm();
  if (nh == 0.0 || ni == 0.0) return 0.0;
  return (H * I - I * H).norm() / (nh * ni);
}

}  // namespace nrc
