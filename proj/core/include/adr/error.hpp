#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace adr {

enum class ErrorCode {
  InvalidArgument,
  InvalidTrace,
  EmptyGroup,
  GroupTooSmall,
  NotADistribution,
  EmptyUnit,
  AlignmentMismatch,
  OracleFailure,
  BudgetZero,
  NoCompleteNode,
  ClientUnavailable,
  LengthMismatch,
  SampleCountMismatch,
  DivisionDomain,
  MissingBaseline,
  InvalidConfig,
  Io,
};

// Upper-case wire name, e.g. "EMPTY_GROUP".
std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace adr
