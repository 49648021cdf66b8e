#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace hybrid {

enum class ErrorCode {
  // graph validation
  CycleDetected,
  DanglingEdge,
  DuplicateTask,
  DuplicateEdge,
  NegativeTime,
  ArityMismatch,
  AllTypesForbidden,
  // schedule validation
  Overlap,
  PrecedenceViolation,
  WrongDuration,
  MachineOutOfRange,
  MissingTask,
  EmptySchedule,
  AllocatesForbiddenType,
  // LP
  Infeasible,
  Unbounded,
  IterationLimit,
  InfeasibleInjection,
  // online
  PredecessorNotCommitted,
  // generators / oracle
  ParameterOutOfRange,
  TooLarge,
  // I/O
  ParseError,
  IoError,
  InvalidArgument,
};

std::string_view to_string(ErrorCode code);

/// Coarse classification used for CLI exit codes.
enum class ErrorKind { Validation, Input, Internal };

ErrorKind kind_of(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// Parse failure with a 1-based line number (0 when unknown).
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& reason)
      : Error(ErrorCode::ParseError, "line " + std::to_string(line) + ": " + reason),
        line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace hybrid
