#pragma once

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include <complex>
#include <cstddef>
#include <functional>
#include <span>

#include "nrc/algebra.hpp"
#include "nrc/dynamics.hpp"
#include "nrc/ode.hpp"
#include "nrc/protocols.hpp"
#include "nrc/states.hpp"

namespace nrc {

struct FockOperators {
  CMatrix a;
  CMatrix q;
  CMatrix p;
  CMatrix n;
};

// q = (a + a^dag) / sqrt(2 m w), p = i sqrt(m w / 2) (a^dag - a), truncated.
FockOperators fock_operators(std::size_t d, double mass, double omega_ref);

// Scaling frame q = b x, p = p_x / b + m b' x.  b = 1 is the lab frame; b = rho
// of an Ermakov-exact protocol removes the Hamiltonian entirely.
struct ScalingFrame {
  std::function<double(double)> b;
  std::function<double(double)> b_dot;
  std::function<double(double)> b_ddot;
  std::function<double(double)> inv_b2_integral;  // int_0^t ds / b(s)^2
};

ScalingFrame lab_frame();
ScalingFrame protocol_frame(const HoProtocol& p);

// Linear map between frame (x, p_x) and lab (q, p) Gaussian records.
GaussianMoments frame_to_lab(const GaussianMoments& m, double b, double b_dot, double mass);
GaussianMoments lab_to_frame(const GaussianMoments& m, double b, double b_dot, double mass);

struct FockOptions {
  std::size_t d = 0;  // 0: adaptive
  std::size_t d_max = 1024;
  double leak_tol = 1e-8;  // allowed population of the top two levels
  OdeOptions ode;
};

struct FockResult {
  CMatrix rho;  // interaction picture w.r.t. (omega0 / b^2)(N + 1/2) in the frame
  double phase = 0.0;  // omega0 int dt / b^2 at t_f
  double b = 1.0;
  double b_dot = 0.0;
  std::size_t d = 0;
  double top_population = 0.0;
  bool truncation_warning = false;
  double max_trace_drift = 0.0;
  GaussianMoments lab_moments;
  OdeStats stats;
};

// Initial state given in the Fock basis of omega0 at dimension d.
using FockInitial = std::function<CMatrix(std::size_t)>;

FockInitial thermal_initial(double nbar);
FockInitial coherent_initial(std::complex<double> alpha);

// Master equation for the oscillator with q or q^2 noise in a truncated Fock
// basis of frequency omega0.  d0 = max(40, 8 (occupation + 1)) doubles until
// the top two levels hold less than leak_tol; the warning flag is set when
// d_max is reached first.
FockResult integrate_fock(const FockInitial& initial, double occupation, const TrapSchedule& trap,
                          const ScalingFrame& frame, std::span<const NoiseChannel> channels,
                          const FockOptions& opt = {});

// A lab-frame Gaussian target mapped into the representation of `result`.
CMatrix fock_target(const GaussianMoments& lab_target, const FockResult& result, double mass,
                    double omega0);

}  // namespace nrc
