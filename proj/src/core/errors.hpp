#pragma once
#include <stdexcept>
#include <string>

namespace td {

// Failure taxonomy shared by the core and the C API layer.
enum class ErrorCode {
  InvalidParameter,
  DegenerateThreshold,
  DivergentIntegral,
  AccuracyFailure,
  PhaseViolation,
  InsufficientHorizon,
  TruncatedTrace,
  InvalidMeasurement,
  BadConfig,
  Io,
  Internal,
};

class Error : public std::runtime_error {
public:
  Error(ErrorCode code, const std::string &what)
      : std::runtime_error(what), code_(code) {}
  ErrorCode code() const { return code_; }

private:
  ErrorCode code_;
};

inline Error invalid_parameter(const std::string &msg) {
  return Error(ErrorCode::InvalidParameter, msg);
}
inline Error accuracy_failure(const std::string &msg) {
  return Error(ErrorCode::AccuracyFailure, msg);
}
inline Error bad_config(const std::string &msg) {
  return Error(ErrorCode::BadConfig, msg);
}

} // namespace td
