#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace depmet {

enum class ErrorKind {
  InvalidArgument,
  ZeroVariance,
  TooFewObservations,
  DegenerateBins,
  DegenerateAxis,
  InputTooLarge,
  InsufficientRepetitions,
  MissingThreshold,
  RejectionCapExceeded,
  ConfigError,
  IoError,
};

std::string_view to_string(ErrorKind kind);

/// Every failure raised by the library carries one of the kinds above so that
/// callers (experiment loops, the CLI) can branch without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

inline std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::ZeroVariance: return "ZeroVariance";
    case ErrorKind::TooFewObservations: return "TooFewObservations";
    case ErrorKind::DegenerateBins: return "DegenerateBins";
    case ErrorKind::DegenerateAxis: return "DegenerateAxis";
    case ErrorKind::InputTooLarge: return "InputTooLarge";
    case ErrorKind::InsufficientRepetitions: return "InsufficientRepetitions";
    case ErrorKind::MissingThreshold: return "MissingThreshold";
    case ErrorKind::RejectionCapExceeded: return "RejectionCapExceeded";
    case ErrorKind::ConfigError: return "ConfigError";
    case ErrorKind::IoError: return "IoError";
  }
  return "Unknown";
}

}  // namespace depmet
