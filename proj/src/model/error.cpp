#include "whatif/error.hpp"

namespace whatif {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::UnknownVariable: return "UnknownVariable";
    case ErrorKind::IndexOutOfSpace: return "IndexOutOfSpace";
    case ErrorKind::DuplicateConstraintName: return "DuplicateConstraintName";
    case ErrorKind::MissingVariable: return "MissingVariable";
    case ErrorKind::InvalidModel: return "InvalidModel";
    case ErrorKind::NumericalInstability: return "NumericalInstability";
    case ErrorKind::NodeLimitExceeded: return "NodeLimitExceeded";
    case ErrorKind::UnknownScenario: return "UnknownScenario";
    case ErrorKind::InfeasibleAssignment: return "InfeasibleAssignment";
    case ErrorKind::DataFormat: return "DataFormat";
    case ErrorKind::SyntaxError: return "SyntaxError";
    case ErrorKind::UnknownEntity: return "UnknownEntity";
    case ErrorKind::UnknownParam: return "UnknownParam";
    case ErrorKind::MagnitudeExceeded: return "MagnitudeExceeded";
    case ErrorKind::ProgramTooLong: return "ProgramTooLong";
    case ErrorKind::SensitiveDataDenied: return "SensitiveDataDenied";
    case ErrorKind::InvalidEdit: return "InvalidEdit";
    case ErrorKind::PoolExhausted: return "PoolExhausted";
    case ErrorKind::BudgetTooSmall: return "BudgetTooSmall";
    case ErrorKind::RetriesExhausted: return "RetriesExhausted";
    case ErrorKind::LlmUnavailable: return "LlmUnavailable";
    case ErrorKind::GeneratorError: return "GeneratorError";
    case ErrorKind::IoError: return "IoError";
  }
  return "Error";
}

}  // namespace whatif
