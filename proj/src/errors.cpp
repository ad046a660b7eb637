#include "ringchaos/errors.hpp"

namespace ringchaos {

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::InsufficientFleet: return "InsufficientFleet";
    case ErrorKind::InvalidPosition: return "InvalidPosition";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::DomainError: return "DomainError";
    case ErrorKind::EmptyRequest: return "EmptyRequest";
    case ErrorKind::InsufficientData: return "InsufficientData";
    case ErrorKind::Unsupported: return "Unsupported";
    case ErrorKind::SingularConfiguration: return "SingularConfiguration";
    case ErrorKind::NotHermitian: return "NotHermitian";
    case ErrorKind::ConfigError: return "ConfigError";
    case ErrorKind::IoError: return "IoError";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::EmptySnapshot: return "EmptySnapshot";
    case ErrorKind::UsageError: return "UsageError";
  }
  return "Unknown";
}

bool is_input_error(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::InvalidPosition:
    case ErrorKind::DimensionMismatch:
    case ErrorKind::DomainError:
    case ErrorKind::EmptyRequest:
    case ErrorKind::InsufficientFleet:
    case ErrorKind::Unsupported:
    case ErrorKind::ConfigError:
    case ErrorKind::IoError:
    case ErrorKind::ParseError:
    case ErrorKind::EmptySnapshot:
    case ErrorKind::UsageError:
      return true;
    default:
      return false;
  }
}

}  // namespace ringchaos
