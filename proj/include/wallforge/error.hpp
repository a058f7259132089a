#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace wallforge {

enum class ErrorCode {
  domain,           // non-finite input or parameter outside the admissible set
  usage,            // caller violated a precondition (mismatched grids, bad dt, ...)
  unsupported,      // operation not defined for this potential kind
  axiom_violation,  // (W1)-(W5) check failed
  invalid_config,   // configuration parse / validation failure
  not_converged,
  singular,
  no_crossing,
  no_pinning_point,
  degenerate,
  marginal,
  left_orbit,
  non_finite,
  io,
};

std::string_view to_string(ErrorCode code);

/// Single exception type for the library; `code()` carries the failure class
/// so callers (and the CLI exit-code mapping) can branch on it.
class Error : public std::runtime_error {
public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

private:
  ErrorCode code_;
};

inline std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::domain: return "domain error";
    case ErrorCode::usage: return "usage error";
    case ErrorCode::unsupported: return "unsupported";
    case ErrorCode::axiom_violation: return "axiom violation";
    case ErrorCode::invalid_config: return "invalid config";
    case ErrorCode::not_converged: return "not converged";
    case ErrorCode::singular: return "singular";
    case ErrorCode::no_crossing: return "no crossing";
    case ErrorCode::no_pinning_point: return "no pinning point";
    case ErrorCode::degenerate: return "degenerate";
    case ErrorCode::marginal: return "marginal";
    case ErrorCode::left_orbit: return "left orbit";
    case ErrorCode::non_finite: return "non-finite";
    case ErrorCode::io: return "io error";
  }
  return "error";
}

}  // namespace wallforge
