#ifndef UNIMECH_ERRORS_HPP
#define UNIMECH_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace unimech {

enum class ErrorCode {
  NonFinite,
  InsufficientSamples,
  SingularHessian,
  DegenerateBorderedMatrix,
  InfeasiblePoint,
  ProjectionFailed,
  ShootingDiverged,
  InvariantViolation,
  ConfigError,
};

inline const char* to_string(ErrorCode c) {
  switch (c) {
    case ErrorCode::NonFinite: return "NonFinite";
    case ErrorCode::InsufficientSamples: return "InsufficientSamples";
    case ErrorCode::SingularHessian: return "SingularHessian";
    case ErrorCode::DegenerateBorderedMatrix: return "DegenerateBorderedMatrix";
    case ErrorCode::InfeasiblePoint: return "InfeasiblePoint";
    case ErrorCode::ProjectionFailed: return "ProjectionFailed";
    case ErrorCode::ShootingDiverged: return "ShootingDiverged";
    case ErrorCode::InvariantViolation: return "InvariantViolation";
    case ErrorCode::ConfigError: return "ConfigError";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& msg) : std::runtime_error(msg), code_(code) {}
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

// Carries the smallest terminal mismatch reached before giving up.
class ShootingDiverged : public Error {
 public:
  ShootingDiverged(const std::string& msg, double best)
      : Error(ErrorCode::ShootingDiverged, msg), best_residual(best) {}
  double best_residual;
};

}  // namespace unimech

#endif  // UNIMECH_ERRORS_HPP
