#include "nrc/optimizer.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <numeric>
#include <thread>

#include "nrc/error.hpp"
#include "nrc/quadrature.hpp"

namespace nrc {

std::vector<std::vector<double>> scan_points(std::span<const ScanAxis> axes) {
  std::vector<std::vector<double>> values;
  for (const auto& a : axes) {
    if (!std::isfinite(a.lo) || !std::isfinite(a.hi) || a.points == 0)
      throw Error(ErrorKind::invalid_argument, "scan axis '" + a.name + "' is not finite");
    values.push_back(a.points == 1 ? std::vector<double>{a.lo} : quad::uniform_grid(a.lo, a.hi, a.points));
  }
  std::vector<std::vector<double>> out{{}};
  for (const auto& v : values) {
    std::vector<std::vector<double>> next;
    next.reserve(out.size() * v.size());
    for (const auto& prefix : out)
      for (double x : v) {
        auto p = prefix;
        p.push_back(x);
        next.push_back(std::move(p));
      }
    out = std::move(next);
  }
  return out;
}

std::size_t default_workers() {
  return std::max<std::size_t>(1, std::thread::hardware_concurrency());
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body, std::size_t workers) {
  if (workers == 0) workers = default_workers();
  workers = std::min(workers, std::max<std::size_t>(n, 1));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::atomic<bool> failed{false};
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n && !failed; i = next++) {
        try {
          body(i);
        } catch (...) {
          if (!failed.exchange(true)) failure = std::current_exception();
        }
      }
    });
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

std::vector<ScanRow> scan(std::span<const ScanAxis> axes, const CellEvaluator& evaluate,
                          std::size_t workers) {
  const auto points = scan_points(axes);
  std::vector<ScanRow> rows(points.size());
  parallel_for(
      points.size(),
      [&](std::size_t i) {
        ScanRow& r = rows[i];
        r.index = i;
        r.coeffs = points[i];
        try {
          r.values = evaluate(r.coeffs);
        } catch (const std::exception& e) {
          r.values.clear();
          r.error = e.what();
        }
      },
      workers);
  return rows;
}

namespace {

double safe_eval(const Objective& f, const std::vector<double>& x) {
  const double v = f(x);
  return std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
}

}  // namespace

MinimizeResult minimize(const Objective& f, std::vector<double> x0, const NelderMeadOptions& opt) {
  std::vector<std::vector<double>> simplex{x0};
  for (std::size_t i = 0; i < x0.size(); ++i) {
    auto p = x0;
    p[i] += opt.initial_step;
    simplex.push_back(std::move(p));
  }
  return minimize(f, std::move(simplex), opt);
}

MinimizeResult minimize(const Objective& f, std::vector<std::vector<double>> simplex,
                        const NelderMeadOptions& opt) {
  if (simplex.empty()) throw Error(ErrorKind::invalid_argument, "empty simplex");
  const std::size_t n = simplex.front().size();
  if (simplex.size() != n + 1) throw Error(ErrorKind::invalid_argument, "simplex needs n + 1 points");
  MinimizeResult res;
  res.initial_value = f(simplex.front());
  if (!std::isfinite(res.initial_value))
    throw Error(ErrorKind::non_finite_objective, "objective is not finite at the starting point");
  if (n == 0) {
    res.value = res.initial_value;
    res.converged = true;
    return res;
  }

  std::vector<double> fv(n + 1);
  fv[0] = res.initial_value;
  for (std::size_t i = 1; i <= n; ++i) fv[i] = safe_eval(f, simplex[i]);

  std::vector<std::size_t> order(n + 1);
  auto sort_simplex = [&] {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return fv[a] < fv[b]; });
    std::vector<std::vector<double>> s2;
    std::vector<double> f2;
    for (std::size_t i : order) {
      s2.push_back(simplex[i]);
      f2.push_back(fv[i]);
    }
    simplex = std::move(s2);
    fv = std::move(f2);
  };
  auto diameter = [&] {
    double d = 0.0;
    for (std::size_t i = 1; i <= n; ++i) {
      double s = 0.0;
      for (std::size_t k = 0; k < n; ++k) s = std::max(s, std::abs(simplex[i][k] - simplex[0][k]));
      d = std::max(d, s);
    }
    return d;
  };
  auto combine = [&](const std::vector<double>& c, const std::vector<double>& w, double t) {
    std::vector<double> x(n);
    for (std::size_t k = 0; k < n; ++k) x[k] = c[k] + t * (w[k] - c[k]);
    return x;
  };

  sort_simplex();
  int it = 0;
  for (; it < opt.max_iter; ++it) {
    if (opt.trace) opt.trace(it, fv[0], simplex[0]);
    if (diameter() < opt.diameter_tol) {
      res.converged = true;
      break;
    }
    std::vector<double> centroid(n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t k = 0; k < n; ++k) centroid[k] += simplex[i][k] / static_cast<double>(n);
    const auto& worst = simplex[n];
    const auto xr = combine(centroid, worst, -1.0);
    const double fr = safe_eval(f, xr);
    if (fr < fv[0]) {
      const auto xe = combine(centroid, worst, -2.0);
      const double fe = safe_eval(f, xe);
      if (fe < fr) { simplex[n] = xe; fv[n] = fe; }
      else { simplex[n] = xr; fv[n] = fr; }
    } else if (fr < fv[n - 1]) {
      simplex[n] = xr;
      fv[n] = fr;
    } else {
      const bool outside = fr < fv[n];
      const auto xc = outside ? combine(centroid, worst, -0.5) : combine(centroid, worst, 0.5);
      const double fc = safe_eval(f, xc);
      if (fc < (outside ? fr : fv[n])) {
        simplex[n] = xc;
        fv[n] = fc;
      } else {
        for (std::size_t i = 1; i <= n; ++i) {
          simplex[i] = combine(simplex[0], simplex[i], 0.5);
          fv[i] = safe_eval(f, simplex[i]);
        }
      }
    }
    sort_simplex();
  }
  res.iterations = it;
  res.x = simplex[0];
  res.value = fv[0];
  return res;
}

ConstrainedResult constrained_minimize(const std::function<double(const HoProtocol&)>& objective,
                                       const HoFamily& family, double g_target, double r6_start,
                                       const NelderMeadOptions& opt, const RootOptions& root) {
  auto build = [&](double r6) {
    const double fixed[1] = {r6};
    return constrain_g_phase(family, g_target, fixed, root);
  };
  build(r6_start);  // a start without a root raises NoRoot
  const Objective f = [&](std::span<const double> x) {
    try {
      return objective(build(x[0]));
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::no_root || e.kind() == ErrorKind::non_positive_rho)
        return std::numeric_limits<double>::infinity();
      throw;
    }
  };
  const auto r = minimize(f, std::vector<double>{r6_start}, opt);
  return {build(r.x[0]), r.value, r.initial_value, r.iterations};
}

}  // namespace nrc
