#include "steinbias/errors.hpp"

namespace steinbias {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::ParameterOutOfRange: return "ParameterOutOfRange";
    case ErrorCode::KindUnsupported: return "KindUnsupported";
    case ErrorCode::MomentInfinite: return "MomentInfinite";
    case ErrorCode::DegreeTooLarge: return "DegreeTooLarge";
    case ErrorCode::SingularMomentMatrix: return "SingularMomentMatrix";
    case ErrorCode::TruncationInsufficient: return "TruncationInsufficient";
    case ErrorCode::NotApplicable: return "NotApplicable";
    case ErrorCode::OrthogonalityViolated: return "OrthogonalityViolated";
    case ErrorCode::NonPositiveAlpha: return "NonPositiveAlpha";
    case ErrorCode::SignStructureMismatch: return "SignStructureMismatch";
    case ErrorCode::YSamplerFailure: return "YSamplerFailure";
    case ErrorCode::NegativeMass: return "NegativeMass";
    case ErrorCode::SingularSystem: return "SingularSystem";
    case ErrorCode::PreconditionViolated: return "PreconditionViolated";
    case ErrorCode::SizeOverflow: return "SizeOverflow";
    case ErrorCode::FamilyNotClosed: return "FamilyNotClosed";
    case ErrorCode::MembershipViolated: return "MembershipViolated";
    case ErrorCode::OrderViolated: return "OrderViolated";
    case ErrorCode::NonFiniteValue: return "NonFiniteValue";
    case ErrorCode::OperatorParamMismatch: return "OperatorParamMismatch";
    case ErrorCode::ConfigInvalid: return "ConfigInvalid";
    case ErrorCode::IoFailure: return "IoFailure";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& what, int index)
    : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code), message_(what), index_(index) {}

}  // namespace steinbias
