#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace ringchaos {

enum class ErrorKind {
  InsufficientFleet,
  InvalidPosition,
  DimensionMismatch,
  DomainError,
  EmptyRequest,
  InsufficientData,
  Unsupported,
  SingularConfiguration,
  NotHermitian,
  ConfigError,
  IoError,
  ParseError,
  EmptySnapshot,
  UsageError,
};

const char* to_string(ErrorKind kind) noexcept;

// Input errors map to CLI exit code 2, everything else to 1.
bool is_input_error(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

// Non-fatal diagnostics collected alongside a result.
using Warnings = std::vector<std::string>;

}  // namespace ringchaos
