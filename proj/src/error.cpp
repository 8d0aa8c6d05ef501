#include "noiselab/error.hpp"

namespace noiselab {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::NonPositiveVariance: return "non_positive_variance";
    case ErrorCode::PerfectCorrelation: return "perfect_correlation";
    case ErrorCode::LengthMismatch: return "length_mismatch";
    case ErrorCode::NegativeNoiseVariance: return "negative_noise_variance";
    case ErrorCode::SingularMatrix: return "singular_matrix";
    case ErrorCode::NegativeDeterminant: return "negative_determinant";
    case ErrorCode::AlphaOutOfRange: return "alpha_out_of_range";
    case ErrorCode::NonFiniteInput: return "non_finite_input";
    case ErrorCode::KTooSmall: return "k_too_small";
    case ErrorCode::NonSquare: return "non_square";
    case ErrorCode::NumericalSingularity: return "numerical_singularity";
    case ErrorCode::SampleCountTooSmall: return "sample_count_too_small";
    case ErrorCode::DegenerateConfig: return "degenerate_config";
    case ErrorCode::BatchTooSmall: return "batch_too_small";
    case ErrorCode::ShapeMismatch: return "shape_mismatch";
    case ErrorCode::NonFiniteLoss: return "non_finite_loss";
    case ErrorCode::NonFiniteGradient: return "non_finite_gradient";
    case ErrorCode::InvalidArgument: return "invalid_argument";
  }
  return "unknown";
}

bool is_numerical(ErrorCode code) {
  switch (code) {
    case ErrorCode::SingularMatrix:
    case ErrorCode::NegativeDeterminant:
    case ErrorCode::NumericalSingularity:
    case ErrorCode::NonFiniteLoss:
    case ErrorCode::NonFiniteGradient:
      return true;
    default:
      return false;
  }
}

}  // namespace noiselab
