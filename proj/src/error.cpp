#include "bogo/error.hpp"

namespace bogo {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::NonIntegrablePotential: return "NonIntegrablePotential";
    case ErrorCode::AsymptoteFitFailure: return "AsymptoteFitFailure";
    case ErrorCode::GridMismatch: return "GridMismatch";
    case ErrorCode::CutoffTooSmall: return "CutoffTooSmall";
    case ErrorCode::UnderresolvedGrid: return "UnderresolvedGrid";
    case ErrorCode::InsufficientSamplePoints: return "InsufficientSamplePoints";
    case ErrorCode::NonConvergence: return "NonConvergence";
    case ErrorCode::BoxTooSmall: return "BoxTooSmall";
    case ErrorCode::DegenerateQuadrature: return "DegenerateQuadrature";
    case ErrorCode::NonPositiveD: return "NonPositiveD";
    case ErrorCode::UnderresolvedKernel: return "UnderresolvedKernel";
    case ErrorCode::IndefiniteInner: return "IndefiniteInner";
    case ErrorCode::SingularE: return "SingularE";
    case ErrorCode::SingularD: return "SingularD";
    case ErrorCode::DimensionOverflow: return "DimensionOverflow";
    case ErrorCode::NonConvergentTruncation: return "NonConvergentTruncation";
    case ErrorCode::TruncationLeak: return "TruncationLeak";
    case ErrorCode::ExplosionGuard: return "ExplosionGuard";
    case ErrorCode::CapMismatch: return "CapMismatch";
    case ErrorCode::InsufficientEllValues: return "InsufficientEllValues";
  }
  return "Unknown";
}

}  // namespace bogo
