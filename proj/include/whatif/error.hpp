#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace whatif {

enum class ErrorKind {
  // model-core
  UnknownVariable,
  IndexOutOfSpace,
  DuplicateConstraintName,
  MissingVariable,
  InvalidModel,
  // mip-solver
  NumericalInstability,
  NodeLimitExceeded,
  // scenarios
  UnknownScenario,
  InfeasibleAssignment,
  DataFormat,
  // edit-dsl
  SyntaxError,
  UnknownEntity,
  UnknownParam,
  MagnitudeExceeded,
  ProgramTooLong,
  SensitiveDataDenied,
  InvalidEdit,
  // agents
  PoolExhausted,
  BudgetTooSmall,
  RetriesExhausted,
  LlmUnavailable,
  // benchmark
  GeneratorError,
  IoError,
};

std::string_view to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(to_string(kind)) + ": " + message),
        kind_(kind),
        detail_(message) {}

  ErrorKind kind() const noexcept { return kind_; }
  // Message without the kind prefix.
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorKind kind_;
  std::string detail_;
};

}  // namespace whatif
