#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace steinbias {

enum class ErrorCode {
  ParameterOutOfRange,
  KindUnsupported,
  MomentInfinite,
  DegreeTooLarge,
  SingularMomentMatrix,
  TruncationInsufficient,
  NotApplicable,
  OrthogonalityViolated,
  NonPositiveAlpha,
  SignStructureMismatch,
  YSamplerFailure,
  NegativeMass,
  SingularSystem,
  PreconditionViolated,
  SizeOverflow,
  FamilyNotClosed,
  MembershipViolated,
  OrderViolated,
  NonFiniteValue,
  OperatorParamMismatch,
  ConfigInvalid,
  IoFailure,
};

std::string_view to_string(ErrorCode code);

// All library failures are reported through this type. `index` carries an
// optional integer detail (e.g. the failing orthogonality order).
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what, int index = -1);

  ErrorCode code() const noexcept { return code_; }
  int index() const noexcept { return index_; }
  // The text without the code prefix.
  const std::string& message() const noexcept { return message_; }

 private:
  ErrorCode code_;
  std::string message_;
  int index_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what, int index = -1) {
  throw Error(code, what, index);
}

}  // namespace steinbias
