#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace nrc {

enum class ErrorKind {
  dimension_mismatch,
  invalid_argument,
  singular_control,
  constraint_violated,
  non_positive_rho,
  singular_interpolation,
  no_root,
  step_size_underflow,
  zero_normalizer,
  all_zero_strengths,
  non_psd_input,
  invalid_covariance,
  unsupported_channel,
  non_finite_objective,
  degenerate_spectrum,
  config,
};

std::string_view to_string(ErrorKind kind) noexcept;

// Numerical and contract failures raised by the library.  Configuration
// problems use the `config` kind so the CLI can map them to exit code 2.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

inline std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::dimension_mismatch: return "DimensionMismatch";
    case ErrorKind::invalid_argument: return "InvalidArgument";
    case ErrorKind::singular_control: return "SingularControl";
    case ErrorKind::constraint_violated: return "ConstraintViolated";
    case ErrorKind::non_positive_rho: return "NonPositiveRho";
    case ErrorKind::singular_interpolation: return "SingularInterpolation";
    case ErrorKind::no_root: return "NoRoot";
    case ErrorKind::step_size_underflow: return "StepSizeUnderflow";
    case ErrorKind::zero_normalizer: return "ZeroNormalizer";
    case ErrorKind::all_zero_strengths: return "AllZeroStrengths";
    case ErrorKind::non_psd_input: return "NonPSDInput";
    case ErrorKind::invalid_covariance: return "InvalidCovariance";
    case ErrorKind::unsupported_channel: return "UnsupportedChannel";
    case ErrorKind::non_finite_objective: return "NonFiniteObjective";
    case ErrorKind::degenerate_spectrum: return "DegenerateSpectrum";
    case ErrorKind::config: return "ConfigError";
  }
  return "Unknown";
}

}  // namespace nrc
