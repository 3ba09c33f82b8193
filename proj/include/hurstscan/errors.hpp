#pragma once

#include <stdexcept>
#include <string>

namespace hurstscan {

enum class ErrorKind {
  InvalidScale,
  InvalidData,
  InvalidParameter,
  InvalidProfile,
  DegenerateWindow,
  DegenerateRegression,
  InsufficientScales,
  InsufficientData,
  InsufficientHistory,
  NoCrossing,
  Parse,
  Validation,
  EmptyInput,
  Io,
  Generation,
};

// Single exception type for the whole library; kind() drives the CLI
// exit-code mapping.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void raise(ErrorKind kind, const std::string& message) {
  throw Error(kind, message);
}

}  // namespace hurstscan
