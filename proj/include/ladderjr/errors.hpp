#pragma once

#include <stdexcept>
#include <string>

namespace ladder {

// Error classes carry the CLI exit code they map to.
class Error : public std::runtime_error {
 public:
  Error(const std::string& what, int exit_code) : std::runtime_error(what), exit_code_(exit_code) {}
  int exit_code() const noexcept { return exit_code_; }

 private:
  int exit_code_;
};

/// Invalid or inconsistent user configuration (exit code 2).
class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what) : Error(what, 2) {}
};

/// A required input file is absent (exit code 3).
class MissingInputError : public Error {
 public:
  explicit MissingInputError(const std::string& what) : Error(what, 3) {}
};

/// The request exceeds the memory budget (exit code 4).
class CapacityError : public Error {
 public:
  CapacityError(const std::string& what, unsigned long long required_bytes)
      : Error(what, 4), required_bytes_(required_bytes) {}
  unsigned long long required_bytes() const noexcept { return required_bytes_; }

 private:
  unsigned long long required_bytes_;
};

/// Numerical failure: unresolved expansion, aliasing, underflow, unreliable fit (exit code 5).
class NumericalError : public Error {
 public:
  explicit NumericalError(const std::string& what) : Error(what, 5) {}
};

/// Arguments that violate an operation's preconditions (dimension mismatch and the like).
class InvalidInput : public Error {
 public:
  explicit InvalidInput(const std::string& what) : Error(what, 5) {}
};

}  // namespace ladder
