#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace lqmfg {

enum class ErrorKind {
  InvalidArgument,
  DimensionMismatch,
  AsymmetricInput,
  NotSPD,
  NotHurwitz,
  ImaginaryEigenvalues,
  NoSymmetricSolution,
  DimensionTooLarge,
  DegenerateSpectrum,
  BNotInvertible,
  AssumptionViolation,
  DiscountTooLarge,
  InfeasibleAtZero,
  SingularConversion,
  NotAdmissible,
  UnstableStep,
  TruncationTooCoarse,
  ParseError,
  ValidationError,
  IOError,
};

std::string_view to_string(ErrorKind kind) noexcept;

/// Every failure raised by the library carries one of the kinds above so
/// callers (the CLI in particular) can map it to a stable exit status.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message);

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] void fail(ErrorKind kind, const std::string& message);

}  // namespace lqmfg
