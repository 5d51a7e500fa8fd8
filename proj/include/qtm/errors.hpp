#pragma once

#include <stdexcept>
#include <string>

namespace qtm {

enum class ErrorCode {
  NotHermitian,
  NoConvergence,
  DimensionMismatch,
  NotPositive,
  DegenerateObservable,
  Saturated,
  ValidityViolated,
  InfeasibleSaturation,
  TooManyAncillae,
  IrreversibleEdge,
  NotStationary,
  InvalidArgument,
  ConfigError,
  IoError,
};

class Error : public std::runtime_error {
public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const { return code_; }

private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
  throw Error(code, what);
}

} // namespace qtm
