#include "hybrid/error.hpp"

namespace hybrid {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::CycleDetected: return "CycleDetected";
    case ErrorCode::DanglingEdge: return "DanglingEdge";
    case ErrorCode::DuplicateTask: return "DuplicateTask";
    case ErrorCode::DuplicateEdge: return "DuplicateEdge";
    case ErrorCode::NegativeTime: return "NegativeTime";
    case ErrorCode::ArityMismatch: return "ArityMismatch";
    case ErrorCode::AllTypesForbidden: return "AllTypesForbidden";
    case ErrorCode::Overlap: return "Overlap";
    case ErrorCode::PrecedenceViolation: return "PrecedenceViolation";
    case ErrorCode::WrongDuration: return "WrongDuration";
    case ErrorCode::MachineOutOfRange: return "MachineOutOfRange";
    case ErrorCode::MissingTask: return "MissingTask";
    case ErrorCode::EmptySchedule: return "EmptySchedule";
    case ErrorCode::AllocatesForbiddenType: return "AllocatesForbiddenType";
    case ErrorCode::Infeasible: return "Infeasible";
    case ErrorCode::Unbounded: return "Unbounded";
    case ErrorCode::IterationLimit: return "IterationLimit";
    case ErrorCode::InfeasibleInjection: return "InfeasibleInjection";
    case ErrorCode::PredecessorNotCommitted: return "PredecessorNotCommitted";
    case ErrorCode::ParameterOutOfRange: return "ParameterOutOfRange";
    case ErrorCode::TooLarge: return "TooLarge";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

ErrorKind kind_of(ErrorCode code) {
  switch (code) {
    case ErrorCode::CycleDetected:
    case ErrorCode::DanglingEdge:
    case ErrorCode::DuplicateTask:
    case ErrorCode::DuplicateEdge:
    case ErrorCode::NegativeTime:
    case ErrorCode::ArityMismatch:
    case ErrorCode::AllTypesForbidden:
    case ErrorCode::Overlap:
    case ErrorCode::PrecedenceViolation:
    case ErrorCode::WrongDuration:
    case ErrorCode::MachineOutOfRange:
    case ErrorCode::MissingTask:
    case ErrorCode::AllocatesForbiddenType:
    case ErrorCode::InfeasibleInjection:
      return ErrorKind::Validation;
    case ErrorCode::ParseError:
    case ErrorCode::IoError:
    case ErrorCode::InvalidArgument:
    case ErrorCode::ParameterOutOfRange:
      return ErrorKind::Input;
    default:
      return ErrorKind::Internal;
  }
}

}  // namespace hybrid
