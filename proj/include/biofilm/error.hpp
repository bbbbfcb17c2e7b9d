#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace biofilm {

enum class ErrorCode {
  too_coarse,
  out_of_domain,
  nonfinite,
  dimension_mismatch,
  nonpositive_param,
  unstable_assembly,
  zero_pivot,
  thickness_collapse,
  picard_diverged,
  envelope_violated,
  nonpositive_thickness,
  parse_error,
  unknown_key,
  schema_violation,
  io_error,
  order_regression,
};

inline std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::too_coarse: return "TOO_COARSE";
    case ErrorCode::out_of_domain: return "OUT_OF_DOMAIN";
    case ErrorCode::nonfinite: return "NONFINITE";
    case ErrorCode::dimension_mismatch: return "DIMENSION_MISMATCH";
    case ErrorCode::nonpositive_param: return "NONPOSITIVE_PARAM";
    case ErrorCode::unstable_assembly: return "UNSTABLE_ASSEMBLY";
    case ErrorCode::zero_pivot: return "ZERO_PIVOT";
    case ErrorCode::thickness_collapse: return "THICKNESS_COLLAPSE";
    case ErrorCode::picard_diverged: return "PICARD_DIVERGED";
    case ErrorCode::envelope_violated: return "ENVELOPE_VIOLATED";
    case ErrorCode::nonpositive_thickness: return "NONPOSITIVE_THICKNESS";
    case ErrorCode::parse_error: return "PARSE_ERROR";
    case ErrorCode::unknown_key: return "UNKNOWN_KEY";
    case ErrorCode::schema_violation: return "SCHEMA_VIOLATION";
    case ErrorCode::io_error: return "IO_ERROR";
    case ErrorCode::order_regression: return "ORDER_REGRESSION";
  }
  return "UNKNOWN";
}

/// Exception carrying a machine-readable code; the message is prefixed with the code name.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// Raised when the per-step fixed-point loop fails to contract.
class PicardDivergence : public Error {
 public:
  PicardDivergence(const std::string& message, std::vector<double> residuals)
      : Error(ErrorCode::picard_diverged, message), residuals_(std::move(residuals)) {}

  const std::vector<double>& residual_history() const noexcept { return residuals_; }

 private:
  std::vector<double> residuals_;
};

}  // namespace biofilm
