#include "lqmfg/error.hpp"

namespace lqmfg {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::AsymmetricInput: return "AsymmetricInput";
    case ErrorKind::NotSPD: return "NotSPD";
    case ErrorKind::NotHurwitz: return "NotHurwitz";
    case ErrorKind::ImaginaryEigenvalues: return "ImaginaryEigenvalues";
    case ErrorKind::NoSymmetricSolution: return "NoSymmetricSolution";
    case ErrorKind::DimensionTooLarge: return "DimensionTooLarge";
    case ErrorKind::DegenerateSpectrum: return "DegenerateSpectrum";
    case ErrorKind::BNotInvertible: return "BNotInvertible";
    case ErrorKind::AssumptionViolation: return "AssumptionViolation";
    case ErrorKind::DiscountTooLarge: return "DiscountTooLarge";
    case ErrorKind::InfeasibleAtZero: return "InfeasibleAtZero";
    case ErrorKind::SingularConversion: return "SingularConversion";
    case ErrorKind::NotAdmissible: return "NotAdmissible";
    case ErrorKind::UnstableStep: return "UnstableStep";
    case ErrorKind::TruncationTooCoarse: return "TruncationTooCoarse";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::ValidationError: return "ValidationError";
    case ErrorKind::IOError: return "IOError";
  }
  return "Unknown";
}

Error::Error(ErrorKind kind, const std::string& message)
    : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

void fail(ErrorKind kind, const std::string& message) { throw Error(kind, message); }

}  // namespace lqmfg
