#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace noiselab {

enum class ErrorCode {
  NonPositiveVariance,
  PerfectCorrelation,
  LengthMismatch,
  NegativeNoiseVariance,
  SingularMatrix,
  NegativeDeterminant,
  AlphaOutOfRange,
  NonFiniteInput,
  KTooSmall,
  NonSquare,
  NumericalSingularity,
  SampleCountTooSmall,
  DegenerateConfig,
  BatchTooSmall,
  ShapeMismatch,
  NonFiniteLoss,
  NonFiniteGradient,
  InvalidArgument,
};

std::string_view to_string(ErrorCode code);

/// True for failures of the numerics themselves (singular factorization,
/// non-finite loss/gradient) as opposed to rejected inputs.
bool is_numerical(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

inline void require(bool condition, ErrorCode code, const std::string& message) {
  if (!condition) fail(code, message);
}

}  // namespace noiselab
