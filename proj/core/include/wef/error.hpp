#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace wef {

enum class ErrorKind {
  Parse,
  Validation,
  Alignment,
  InsufficientHistory,
  DimensionMismatch,
  TrainingDiverged,
  Fit,
  Optimization,
  DegenerateWeights,
  Io,
  Format,
};

std::string_view to_string(ErrorKind kind);

// Base error for every failure raised by the library. The kind drives the
// CLI exit-code mapping; the message is meant for humans.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& message);

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

// Re-raises the in-flight wef::Error with "<stage>: " prepended, keeping its
// kind. Call only from inside a catch block.
[[noreturn]] void rethrow_with_stage(std::string_view stage);

}  // namespace wef
