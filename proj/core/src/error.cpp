#include "adr/error.hpp"

namespace adr {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "INVALID_ARGUMENT";
    case ErrorCode::InvalidTrace: return "INVALID_TRACE";
    case ErrorCode::EmptyGroup: return "EMPTY_GROUP";
    case ErrorCode::GroupTooSmall: return "GROUP_TOO_SMALL";
    case ErrorCode::NotADistribution: return "NOT_A_DISTRIBUTION";
    case ErrorCode::EmptyUnit: return "EMPTY_UNIT";
    case ErrorCode::AlignmentMismatch: return "ALIGNMENT_MISMATCH";
    case ErrorCode::OracleFailure: return "ORACLE_FAILURE";
    case ErrorCode::BudgetZero: return "BUDGET_ZERO";
    case ErrorCode::NoCompleteNode: return "NO_COMPLETE_NODE";
    case ErrorCode::ClientUnavailable: return "CLIENT_UNAVAILABLE";
    case ErrorCode::LengthMismatch: return "LENGTH_MISMATCH";
    case ErrorCode::SampleCountMismatch: return "SAMPLE_COUNT_MISMATCH";
    case ErrorCode::DivisionDomain: return "DIVISION_DOMAIN";
    case ErrorCode::MissingBaseline: return "MISSING_BASELINE";
    case ErrorCode::InvalidConfig: return "INVALID_CONFIG";
    case ErrorCode::Io: return "IO_ERROR";
  }
  return "UNKNOWN";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

}  // namespace adr
