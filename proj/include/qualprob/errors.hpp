#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace qualprob {

enum class ErrorCode {
  SyntaxError,
  UnknownAtom,
  SpaceMismatch,
  InvalidSpace,
  InvalidConditioner,
  InvalidDistribution,
  InvalidOrdering,
  DuplicateId,
  CapExceeded,
  DimensionMismatch,
  SizeCapExceeded,
  EmptyDomain,
  EmptyCredalSet,
  ZeroProbabilityConditioner,
  BudgetExceeded,
  UnknownSession,
  UnknownJudgment,
  InconsistentSession,
  Io,
};

inline std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::SyntaxError: return "syntax_error";
    case ErrorCode::UnknownAtom: return "unknown_atom";
    case ErrorCode::SpaceMismatch: return "space_mismatch";
    case ErrorCode::InvalidSpace: return "invalid_space";
    case ErrorCode::InvalidConditioner: return "invalid_conditioner";
    case ErrorCode::InvalidDistribution: return "invalid_distribution";
    case ErrorCode::InvalidOrdering: return "invalid_ordering";
    case ErrorCode::DuplicateId: return "duplicate_id";
    case ErrorCode::CapExceeded: return "cap_exceeded";
    case ErrorCode::DimensionMismatch: return "dimension_mismatch";
    case ErrorCode::SizeCapExceeded: return "size_cap_exceeded";
    case ErrorCode::EmptyDomain: return "empty_domain";
    case ErrorCode::EmptyCredalSet: return "empty_credal_set";
    case ErrorCode::ZeroProbabilityConditioner: return "zero_probability_conditioner";
    case ErrorCode::BudgetExceeded: return "budget_exceeded";
    case ErrorCode::UnknownSession: return "unknown_session";
    case ErrorCode::UnknownJudgment: return "unknown_judgment";
    case ErrorCode::InconsistentSession: return "inconsistent_session";
    case ErrorCode::Io: return "io_error";
  }
  return "error";
}

// Every failure surfaced by the library. `offset` is a byte offset into the
// text being parsed, when there is one.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message,
        std::optional<std::size_t> offset = std::nullopt)
      : std::runtime_error(message), code_(code), offset_(offset) {}

  ErrorCode code() const noexcept { return code_; }
  std::optional<std::size_t> offset() const noexcept { return offset_; }

 private:
  ErrorCode code_;
  std::optional<std::size_t> offset_;
};

}  // namespace qualprob
