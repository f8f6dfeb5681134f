#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "nrc/protocols.hpp"

namespace nrc {

struct ScanAxis {
  std::string name;
  double lo = 0.0;
  double hi = 0.0;
  std::size_t points = 1;

  bool operator==(const ScanAxis&) const = default;
};

// Full-factorial grid, last axis varying fastest.  An empty axis list gives
// a single empty point.
std::vector<std::vector<double>> scan_points(std::span<const ScanAxis> axes);

struct ScanRow {
  std::size_t index = 0;
  std::vector<double> coeffs;
  std::vector<double> values;  // objective outputs; empty when the cell failed
  std::string error;           // set when the evaluation threw
  bool ok() const noexcept { return error.empty(); }
};

using CellEvaluator = std::function<std::vector<double>(std::span<const double>)>;

// Evaluates every cell on a pool of `workers` threads (0: hardware
// concurrency).  Rows come back in grid order regardless of completion order.
std::vector<ScanRow> scan(std::span<const ScanAxis> axes, const CellEvaluator& evaluate,
                          std::size_t workers = 0);

// Generic ordered parallel map used by scan and the experiments.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body, std::size_t workers = 0);

std::size_t default_workers();

struct NelderMeadOptions {
  double initial_step = 0.1;
  double diameter_tol = 1e-6;
  int max_iter = 500;
  // Called once per iteration with the current best point.
  std::function<void(int, double, std::span<const double>)> trace;
};

struct MinimizeResult {
  std::vector<double> x;
  double value = 0.0;
  double initial_value = 0.0;
  int iterations = 0;
  bool converged = false;
};

using Objective = std::function<double(std::span<const double>)>;

// Nelder-Mead from x0 with an axis-aligned initial simplex.  Non-finite
// values during the search count as +inf; a non-finite start raises
// NonFiniteObjective.
MinimizeResult minimize(const Objective& f, std::vector<double> x0, const NelderMeadOptions& opt = {});

// Same with an explicit initial simplex (n + 1 points).
MinimizeResult minimize(const Objective& f, std::vector<std::vector<double>> simplex,
                        const NelderMeadOptions& opt = {});

struct ConstrainedResult {
  HoProtocol protocol;
  double value = 0.0;
  double initial_value = 0.0;
  int iterations = 0;
};

// Minimize objective(protocol) over r6 while r7 is re-solved for every
// candidate so that g = g_target.  Candidates without a root count as +inf.
ConstrainedResult constrained_minimize(const std::function<double(const HoProtocol&)>& objective,
                                       const HoFamily& family, double g_target, double r6_start,
                                       const NelderMeadOptions& opt = {},
                                       const RootOptions& root = {});

}  // namespace nrc
