#pragma once

#include <stdexcept>
#include <string>

namespace bogo {

enum class ErrorCode {
  InvalidArgument,
  ConfigError,
  NonIntegrablePotential,
  AsymptoteFitFailure,
  GridMismatch,
  CutoffTooSmall,
  UnderresolvedGrid,
  InsufficientSamplePoints,
  NonConvergence,
  BoxTooSmall,
  DegenerateQuadrature,
  NonPositiveD,
  UnderresolvedKernel,
  IndefiniteInner,
  SingularE,
  SingularD,
  DimensionOverflow,
  NonConvergentTruncation,
  TruncationLeak,
  ExplosionGuard,
  CapMismatch,
  InsufficientEllValues,
};

const char* to_string(ErrorCode code) noexcept;

/// Every failure raised by the library carries one of the codes above; the
/// message starts with the code name so CLI output stays greppable.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

inline void require(bool condition, ErrorCode code, const std::string& what) {
  if (!condition) throw Error(code, what);
}

}  // namespace bogo
