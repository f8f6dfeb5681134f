#pragma once

// Dormand-Prince 5(4) embedded pair with FSAL and elementary step control.
// State is any Eigen dense type (real or complex); the error norm is the
// max over components of |err| / (atol + rtol * max(|y|, |y_new|)).

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <string>

#include "nrc/error.hpp"

namespace nrc {

struct OdeOptions {
  double rtol = 1e-9;
  double atol = 1e-12;
  double h_init = 0.0;   // 0: chosen from the problem scale
  double h_min = 1e-14;  // relative to the interval length
  std::size_t max_steps = 5'000'000;
};

struct OdeStats {
  std::size_t accepted = 0;
  std::size_t rejected = 0;
  std::size_t rhs_calls = 0;
};

template <class State>
class Dopri5 {
 public:
  using Rhs = std::function<State(double, const State&)>;
  // Called after every accepted step; may modify the state in place.
  using PostStep = std::function<void(double, State&)>;

  Dopri5(Rhs rhs, OdeOptions opt = {}) : rhs_(std::move(rhs)), opt_(opt) {}

  void set_post_step(PostStep f) { post_ = std::move(f); }
  const OdeStats& stats() const noexcept { return stats_; }

  // Advance y from t0 to each time in `times` (ascending, first >= t0),
  // calling sample(i, t_i, y) at each.  Steps never straddle a sample time.
  template <class Sample>
  State integrate(State y, double t0, std::span<const double> times, Sample&& sample) {
    double t = t0;
    const double span = std::max(std::abs(times.empty() ? 0.0 : times.back() - t0), 1e-300);
    if (h_ <= 0.0) h_ = opt_.h_init > 0.0 ? opt_.h_init : 1e-3 * span;
    State k1 = call(t, y);
    for (std::size_t i = 0; i < times.size(); ++i) {
      const double target = times[i];
      while (t < target) {
        double h = std::min(h_, target - t);
        const bool clipped = h < h_;
        if (h < opt_.h_min * span)
          throw Error(ErrorKind::step_size_underflow, "step size underflow at t = " + std::to_string(t));
        State y_new, k_last;
        const double err = step(t, y, k1, h, y_new, k_last);
        if (err <= 1.0) {
          t = (target - (t + h) <= 1e-15 * span) ? target : t + h;
          y = std::move(y_new);
          if (post_) {
            post_(t, y);
            k1 = call(t, y);
          } else {
            k1 = std::move(k_last);
          }
          ++stats_.accepted;
          const double fac = err == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0);
          if (!clipped) h_ = h * fac;
          else h_ = std::max(h_, h * fac);
        } else {
          ++stats_.rejected;
          h_ = h * std::clamp(0.9 * std::pow(err, -0.2), 0.1, 0.9);
        }
        if (stats_.accepted + stats_.rejected > opt_.max_steps)
          throw Error(ErrorKind::step_size_underflow, "maximum step count exceeded");
      }
      sample(i, target, y);
    }
    return y;
  }

  State integrate(State y, double t0, double t1) {
    const double times[1] = {t1};
    return integrate(std::move(y), t0, std::span<const double>(times, 1),
                     [](std::size_t, double, const State&) {});
  }

 private:
  State call(double t, const State& y) {
    ++stats_.rhs_calls;
    return rhs_(t, y);
  }

  double step(double t, const State& y, const State& k1, double h, State& y_new, State& k7) {
    static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    static constexpr double a21 = 1.0 / 5;
    static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                            a54 = -212.0 / 729;
    static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                            a64 = 49.0 / 176, a65 = -5103.0 / 18656;
    static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                            b5 = -2187.0 / 6784, b6 = 11.0 / 84;
    static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                            e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

    const State k2 = call(t + c2 * h, y + h * (a21 * k1));
    const State k3 = call(t + c3 * h, y + h * (a31 * k1 + a32 * k2));
    const State k4 = call(t + c4 * h, y + h * (a41 * k1 + a42 * k2 + a43 * k3));
    const State k5 = call(t + c5 * h, y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
    const State k6 = call(t + h, y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
    y_new = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
    k7 = call(t + h, y_new);
    const State err = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
    const auto scale =
        (opt_.atol + opt_.rtol * y.cwiseAbs().cwiseMax(y_new.cwiseAbs()).array()).eval();
    const double e = (err.cwiseAbs().array() / scale).maxCoeff();
    return std::isfinite(e) ? e : 1e10;
  }

  Rhs rhs_;
  OdeOptions opt_;
  PostStep post_;
  OdeStats stats_;
  double h_ = 0.0;
};

}  // namespace nrc
