#include "nrc/protocols.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

#include "nrc/error.hpp"
#include "nrc/quadrature.hpp"

namespace nrc {

namespace {

constexpr double pi = units::pi;
constexpr double limit_step = 1e-6;  // one-sided step in s for removable limits

// p(s) - p(s_b) from the expansion `shifted` about s_b.
double increment(const Polynomial& shifted, double u) {
  const auto& c = shifted.coefficients();
  double acc = 0.0;
  for (std::size_t i = c.size(); i-- > 1;) acc = (acc + c[i]) * u;
  return acc;
}

// Order of the first non-vanishing derivative of G at a boundary.
unsigned root_multiplicity(const Polynomial& shifted) {
  const auto& c = shifted.coefficients();
  double scale = 0.0;
  for (double v : c) scale = std::max(scale, std::abs(v));
  for (unsigned k = 1; k < c.size(); ++k)
    if (std::abs(c[k]) > 1e-9 * scale) return k;
  throw Error(ErrorKind::singular_control, "G is constant at a boundary");
}

// sin and cos with multiples of pi/2 snapped to exact values, so that the
// angle-addition below does not inherit sin(pi) = 1.2e-16.
std::pair<double, double> snapped_sincos(double x) {
  const double q = std::round(x / (0.5 * pi));
  if (std::abs(x - q * 0.5 * pi) > 1e-12 * std::max(1.0, std::abs(x)))
    return {std::sin(x), std::cos(x)};
  switch (((static_cast<long long>(q) % 4) + 4) % 4) {
    case 0: return {0.0, 1.0};
    case 1: return {1.0, 0.0};
    case 2: return {0.0, -1.0};
    default: return {-1.0, 0.0};
  }
}

// Taylor shift with the round-off residue below the leading order removed.
Polynomial boundary_expansion(const Polynomial& p, double x0) {
  const Polynomial shifted = p.taylor_shift(x0);
  auto c = shifted.coefficients();
  const unsigned k = root_multiplicity(shifted);
  for (unsigned i = 1; i < k; ++i) c[i] = 0.0;
  return Polynomial(std::move(c));
}

}  // namespace

// ---------------------------------------------------------------- two-level

TlsProtocol::TlsProtocol(double delta0, double t_f, BoundaryPolynomial G, BoundaryPolynomial B)
    : delta0_(delta0), t_f_(t_f), omega_r_(std::abs(delta0)), G_(std::move(G)), B_(std::move(B)) {
  if (!(t_f > 0.0)) throw Error(ErrorKind::invalid_argument, "t_f must be positive");
  if (!(omega_r_ > 0.0)) throw Error(ErrorKind::degenerate_spectrum, "Delta0 must be nonzero");
  G_at0_ = boundary_expansion(G_.polynomial(), 0.0);
  G_at1_ = boundary_expansion(G_.polynomial(), 1.0);
  B_at0_ = B_.polynomial().taylor_shift(0.0);
  B_at1_ = B_.polynomial().taylor_shift(1.0);
}

double TlsProtocol::G(double t) const { return G_(t / t_f_); }
double TlsProtocol::G_dot(double t) const { return G_.derivative_at(t / t_f_, 1) / t_f_; }
double TlsProtocol::B(double t) const { return B_(t / t_f_); }
double TlsProtocol::B_dot(double t) const { return B_.derivative_at(t / t_f_, 1) / t_f_; }

TlsControls TlsProtocol::controls_interior(double s) const {
  const bool left = s < 0.5;
  const double sb = left ? 0.0 : 1.0;
  const double u = s - sb;
  // tan and cot are pi-periodic, so only the increment from the boundary
  // value (an exact multiple of pi for G) matters.
  const double dg = increment(left ? G_at0_ : G_at1_, u);
  const double g_b = left ? G_at0_.coefficients()[0] : G_at1_.coefficients()[0];
  const double b_b = left ? B_at0_.coefficients()[0] : B_at1_.coefficients()[0];
  const double db = increment(left ? B_at0_ : B_at1_, u);

  const double g_dot = (left ? G_at0_ : G_at1_).derivative_at(u, 1) / t_f_;
  const double b_dot = (left ? B_at0_ : B_at1_).derivative_at(u, 1) / t_f_;

  // cos/sin of G = g_b + dg and B = b_b + db by angle addition.
  const auto [sgb, cgb] = snapped_sincos(g_b);
  const auto [sbb, cbb] = snapped_sincos(b_b);
  const double cg = cgb * std::cos(dg) - sgb * std::sin(dg);
  const double sg = sgb * std::cos(dg) + cgb * std::sin(dg);
  const double cb = cbb * std::cos(db) - sbb * std::sin(db);
  const double sbv = sbb * std::cos(db) + cbb * std::sin(db);

  TlsControls c;
  if (g_dot == 0.0) return {-b_dot, 0.0};
  if (sg == 0.0 || sbv == 0.0)
    throw Error(ErrorKind::singular_control, "vanishing sin G or sin B with nonzero G'");
  c.delta = -b_dot + g_dot * (cg * cb) / (sg * sbv);
  c.omega = g_dot / sbv;
  if (!std::isfinite(c.delta) || !std::isfinite(c.omega))
    throw Error(ErrorKind::singular_control, "non-finite control value");
  return c;
}

TlsControls TlsProtocol::controls(double t) const {
  const double s = t / t_f_;
  const bool at_start = s <= 0.0;
  const bool at_end = s >= 1.0;
  if (!at_start && !at_end) {
    const double u = s < 0.5 ? s : s - 1.0;
    const double dg = increment(s < 0.5 ? G_at0_ : G_at1_, u);
    if (dg != 0.0) return controls_interior(s);
  }
  // Removable limit: one-sided Richardson extrapolation 2 f(h) - f(2h).
  const double dir = (at_start || s < 0.5) ? 1.0 : -1.0;
  const double base = at_start ? 0.0 : (at_end ? 1.0 : s);
  const auto c1 = controls_interior(base + dir * limit_step);
  const auto c2 = controls_interior(base + dir * 2.0 * limit_step);
  return {2.0 * c1.delta - c2.delta, 2.0 * c1.omega - c2.omega};
}

Eigen::Matrix2cd TlsProtocol::invariant(double t) const {
  return su2_invariant_matrix(G(t), B(t), omega_r_);
}

Eigen::Matrix2cd TlsProtocol::hamiltonian(double t) const {
  const auto c = controls(t);
  return tls_hamiltonian(c.delta, c.omega);
}

BoundaryPolynomial make_tls_G(std::span<const double> g_extra) {
  std::vector<PolynomialConstraint> cons{{0.0, 0, pi}, {1.0, 0, 0.0}, {0.0, 1, 0.0}, {1.0, 1, 0.0}};
  return solve_boundary_polynomial(std::move(cons), 3 + g_extra.size(), g_extra);
}

TlsProtocol make_tls_protocol(double delta0, double t_f, std::span<const double> g_extra,
                              const BSpec& b_spec, std::size_t grid) {
  if (!(t_f > 0.0)) throw Error(ErrorKind::invalid_argument, "t_f must be positive");
  auto G = make_tls_G(g_extra);

  // A finite Delta at a boundary needs B(t_b) = pi/2 mod pi.
  if (std::abs(std::cos(b_spec.b0)) > 1e-12 || std::abs(std::cos(b_spec.bf)) > 1e-12)
    throw Error(ErrorKind::singular_control, "B(t_b) must be pi/2 mod pi for finite Delta(t_b)");

  // Near t_b, Delta -> -(k + 1) B'(t_b) with k the order of the first
  // non-vanishing derivative of G there.
  const unsigned k0 = root_multiplicity(G.polynomial().taylor_shift(0.0));
  const unsigned kf = root_multiplicity(G.polynomial().taylor_shift(1.0));
  const double bd0 = b_spec.b_dot0.value_or(-delta0 / (k0 + 1.0));
  const double bdf = b_spec.b_dotf.value_or(delta0 / (kf + 1.0));

  std::vector<PolynomialConstraint> bc{
      {0.0, 0, b_spec.b0}, {1.0, 0, b_spec.bf}, {0.0, 1, bd0 * t_f}, {1.0, 1, bdf * t_f}};
  auto B = solve_boundary_polynomial(std::move(bc), 3 + b_spec.extra.size(), b_spec.extra);

  TlsProtocol p(delta0, t_f, std::move(G), std::move(B));
  const auto t = quad::uniform_grid(0.0, t_f, std::max<std::size_t>(grid, 3));
  const Polynomial g0 = boundary_expansion(p.G_poly().polynomial(), 0.0);
  const Polynomial g1 = boundary_expansion(p.G_poly().polynomial(), 1.0);
  for (std::size_t i = 1; i + 1 < t.size(); ++i) {
    // increments from the nearer boundary resolve G close to 0 and pi
    const double s = t[i] / t_f;
    const bool inside = s < 0.5 ? (increment(g0, s) < 0.0 && pi + increment(g0, s) > 0.0)
                                : (increment(g1, s - 1.0) > 0.0 && increment(g1, s - 1.0) < pi);
    if (!inside)
      throw Error(ErrorKind::singular_control, "G leaves (0, pi) inside the protocol window");
    const double sb = std::sin(p.B(t[i]));
    if (std::abs(sb) < 1e-12 || (sb > 0.0) != (std::sin(p.B(0.0)) > 0.0))
      throw Error(ErrorKind::singular_control, "sin B vanishes inside the protocol window");
  }
  return p;
}

// ---------------------------------------------------------------- oscillator

std::string to_string(RhoForm f) {
  return f == RhoForm::inverse_sqrt_poly ? "inverse_sqrt_poly" : "sqrt_poly";
}

RhoForm rho_form_from_string(const std::string& s) {
  if (s == "inverse_sqrt_poly") return RhoForm::inverse_sqrt_poly;
  if (s == "sqrt_poly") return RhoForm::sqrt_poly;
  throw Error(ErrorKind::config, "unknown rho form '" + s + "'");
}

HoProtocol::HoProtocol(const HoFamily& family, BoundaryPolynomial P)
    : family_(family), P_(std::move(P)) {
  if (!(family_.omega0 > 0.0 && family_.omega_f > 0.0 && family_.mass > 0.0 && family_.t_f > 0.0))
    throw Error(ErrorKind::invalid_argument, "omega0, omega_f, mass and t_f must be positive");
  const std::size_t n = std::max<std::size_t>(family_.grid, 3);
  const auto s = quad::uniform_grid(0.0, 1.0, n);
  std::vector<double> inv_rho2(n);
  min_rho_ = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    if (!(P_(s[i]) > 0.0))
      throw Error(ErrorKind::non_positive_rho, "inner polynomial of rho is not positive");
    const double r = rho_s(s[i])[0];
    min_rho_ = std::min(min_rho_, r);
    inv_rho2[i] = 1.0 / (r * r);
    if (omega2(s[i] * family_.t_f) < 0.0) inverted_ = true;
  }
  g_ = family_.t_f * quad::simpson(inv_rho2, 1.0 / static_cast<double>(n - 1));
}

std::vector<double> HoProtocol::free_coefficients() const {
  std::vector<double> out;
  for (std::size_t i : P_.free_indices()) out.push_back(P_.coefficients()[i]);
  return out;
}

std::array<double, 4> HoProtocol::rho_s(double s) const {
  const double p0 = P_(s);
  if (!(p0 > 0.0)) throw Error(ErrorKind::non_positive_rho, "inner polynomial of rho is not positive");
  const double p1 = P_.derivative_at(s, 1), p2 = P_.derivative_at(s, 2), p3 = P_.derivative_at(s, 3);
  const double a = family_.form == RhoForm::inverse_sqrt_poly ? -0.5 : 0.5;
  const double r = std::pow(p0, a);
  // derivatives of p^a with r = p^a factored out
  const double q1 = p1 / p0;
  const double r1 = a * q1;
  const double r2 = a * (a - 1.0) * q1 * q1 + a * p2 / p0;
  const double r3 = a * (a - 1.0) * (a - 2.0) * q1 * q1 * q1 + 3.0 * a * (a - 1.0) * q1 * p2 / p0 + a * p3 / p0;
  return {r, r * r1, r * r2, r * r3};
}

double HoProtocol::rho(double t) const { return rho_s(t / family_.t_f)[0]; }
double HoProtocol::rho_dot(double t) const { return rho_s(t / family_.t_f)[1] / family_.t_f; }
double HoProtocol::rho_ddot(double t) const {
  const double tf = family_.t_f;
  return rho_s(t / tf)[2] / (tf * tf);
}
double HoProtocol::rho_dddot(double t) const {
  const double tf = family_.t_f;
  return rho_s(t / tf)[3] / (tf * tf * tf);
}

double HoProtocol::omega2(double t) const {
  const double tf = family_.t_f;
  const auto r = rho_s(t / tf);
  return omega_from_rho(r[0], r[2] / (tf * tf), family_.omega0);
}

double HoProtocol::omega2_dot(double t) const {
  const double tf = family_.t_f;
  const auto r = rho_s(t / tf);
  const double rho = r[0], rd = r[1] / tf, rdd = r[2] / (tf * tf), rddd = r[3] / (tf * tf * tf);
  const double w0 = family_.omega0;
  return -4.0 * w0 * w0 * rd / std::pow(rho, 5) - rddd / rho + rdd * rd / (rho * rho);
}

double HoProtocol::ermakov_residual(double t) const {
  const double r = rho(t);
  const double w0 = family_.omega0;
  return std::abs(rho_ddot(t) + omega2(t) * r - w0 * w0 / (r * r * r));
}

HoProtocol make_ho_protocol(const HoFamily& family, std::span<const double> r_extra) {
  if (!(family.omega0 > 0.0 && family.omega_f > 0.0))
    throw Error(ErrorKind::invalid_argument, "trap frequencies must be positive");
  const double rho_f = std::sqrt(family.omega0 / family.omega_f);
  const double p_f = family.form == RhoForm::inverse_sqrt_poly ? 1.0 / (rho_f * rho_f) : rho_f * rho_f;
  std::vector<PolynomialConstraint> cons{{0.0, 0, 1.0}, {1.0, 0, p_f}, {0.0, 1, 0.0},
                                         {1.0, 1, 0.0}, {0.0, 2, 0.0}, {1.0, 2, 0.0}};
  auto P = solve_boundary_polynomial(std::move(cons), 5 + r_extra.size(), r_extra);
  return HoProtocol(family, std::move(P));
}

HoProtocol constrain_g_phase(const HoFamily& family, double g_target,
                             std::span<const double> fixed_extra, const RootOptions& opt) {
  if (!(g_target > 0.0)) throw Error(ErrorKind::invalid_argument, "g_target must be positive");
  std::vector<double> extra(fixed_extra.begin(), fixed_extra.end());
  extra.push_back(0.0);

  struct Sample {
    double x;
    double residual;
    bool valid;
  };
  auto eval = [&](double x) -> Sample {
    extra.back() = x;
    try {
      const auto p = make_ho_protocol(family, extra);
      return {x, p.g() - g_target, true};
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::non_positive_rho) throw;
      return {x, 0.0, false};
    }
  };

  const double tol = opt.rel_tol * g_target;
  const Sample origin = eval(0.0);
  if (origin.valid && std::abs(origin.residual) <= tol) {
    extra.back() = 0.0;
    return make_ho_protocol(family, extra);
  }

  // P is linear in the solved coefficient, so positivity holds on an interval
  // and g is monotone there.  Find one valid point, then both interval edges.
  std::optional<Sample> seed;
  if (origin.valid) seed = origin;
  for (double step = opt.initial_step; !seed && step <= opt.max_abs; step *= 2.0)
    for (double dir : {1.0, -1.0}) {
      const Sample s = eval(dir * step);
      if (s.valid) { seed = s; break; }
    }
  if (!seed) throw Error(ErrorKind::no_root, "no admissible coefficient within the search range");
  if (std::abs(seed->residual) <= tol) {
    extra.back() = seed->x;
    return make_ho_protocol(family, extra);
  }

  auto edge = [&](double dir) {
    Sample in = *seed;
    double out_x = std::numeric_limits<double>::quiet_NaN();
    for (double step = opt.initial_step; step <= 2.0 * opt.max_abs; step *= 2.0) {
      const double x = seed->x + dir * step;
      if (std::abs(x) > opt.max_abs) break;
      const Sample s = eval(x);
      if (!s.valid) { out_x = x; break; }
      in = s;
      if (std::signbit(in.residual) != std::signbit(seed->residual)) return in;
    }
    if (std::isnan(out_x)) return in;
    for (int it = 0; it < 80 && std::abs(out_x - in.x) > 1e-13 * std::max(1.0, std::abs(in.x)); ++it) {
      const Sample s = eval(0.5 * (in.x + out_x));
      if (s.valid) in = s;
      else out_x = s.x;
    }
    return in;
  };

  std::optional<std::pair<Sample, Sample>> bracket;
  for (double dir : {1.0, -1.0}) {
    const Sample e = edge(dir);
    if (std::abs(e.residual) <= tol) { extra.back() = e.x; return make_ho_protocol(family, extra); }
    if (std::signbit(e.residual) != std::signbit(seed->residual)) {
      bracket = std::make_pair(*seed, e);
      break;
    }
  }
  if (!bracket) throw Error(ErrorKind::no_root, "g_target not bracketed within the search range");

  Sample lo = bracket->first, hi = bracket->second;
  for (int it = 0; it < opt.max_iter; ++it) {
    if (std::abs(lo.residual) <= tol) { hi = lo; break; }
    if (std::abs(hi.residual) <= tol) break;
    const Sample mid = eval(0.5 * (lo.x + hi.x));
    if (!mid.valid) throw Error(ErrorKind::no_root, "lost positivity inside a valid bracket");
    if (std::signbit(mid.residual) == std::signbit(lo.residual)) lo = mid;
    else hi = mid;
    if (std::abs(hi.x - lo.x) <= 1e-15 * std::max(1.0, std::abs(hi.x))) break;
  }
  const Sample best = std::abs(lo.residual) < std::abs(hi.residual) ? lo : hi;
  extra.back() = best.x;
  return make_ho_protocol(family, extra);
}

ConstantMuProtocol::ConstantMuProtocol(double omega0, double omega_f, double t_f)
    : omega0_(omega0), omega_f_(omega_f), t_f_(t_f), mu_((1.0 / omega0 - 1.0 / omega_f) / t_f) {
  if (!(omega0 > 0.0 && omega_f > 0.0 && t_f > 0.0))
    throw Error(ErrorKind::invalid_argument, "constant-mu protocol needs positive frequencies and t_f");
}

double ConstantMuProtocol::omega(double t) const { return omega0_ / (1.0 - mu_ * omega0_ * t); }

double ConstantMuProtocol::omega_dot(double t) const {
  const double w = omega(t);
  return mu_ * w * w;
}

ConstantMuProtocol make_constant_mu_protocol(double omega0, double omega_f, double t_f) {
  return ConstantMuProtocol(omega0, omega_f, t_f);
}

TrapSchedule trap_schedule(const HoProtocol& p) {
  TrapSchedule s;
  s.t_f = p.t_f();
  s.omega0 = p.omega0();
  s.omega_f = p.omega_f();
  s.mass = p.mass();
  s.omega2 = [p](double t) { return p.omega2(t); };
  s.omega2_dot = [p](double t) { return p.omega2_dot(t); };
  return s;
}

TrapSchedule trap_schedule(const ConstantMuProtocol& p, double mass) {
  TrapSchedule s;
  s.t_f = p.t_f();
  s.omega0 = p.omega0();
  s.omega_f = p.omega_f();
  s.mass = mass;
  s.omega2 = [p](double t) { return p.omega2(t); };
  s.omega2_dot = [p](double t) { return p.omega2_dot(t); };
  return s;
}

TrapSchedule constant_trap(double omega, double mass, double t_f) {
  TrapSchedule s;
  s.t_f = t_f;
  s.omega0 = omega;
  s.omega_f = omega;
  s.mass = mass;
  s.omega2 = [omega](double) { return omega * omega; };
  s.omega2_dot = [](double) { return 0.0; };
  return s;
}

}  // namespace nrc
