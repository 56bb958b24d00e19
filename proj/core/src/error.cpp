#include "wef/error.hpp"

#include <exception>

namespace wef {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Parse: return "parse";
    case ErrorKind::Validation: return "validation";
    case ErrorKind::Alignment: return "alignment";
    case ErrorKind::InsufficientHistory: return "insufficient-history";
    case ErrorKind::DimensionMismatch: return "dimension-mismatch";
    case ErrorKind::TrainingDiverged: return "training-diverged";
    case ErrorKind::Fit: return "fit";
    case ErrorKind::Optimization: return "optimization";
    case ErrorKind::DegenerateWeights: return "degenerate-weights";
    case ErrorKind::Io: return "io";
    case ErrorKind::Format: return "format";
  }
  return "unknown";
}

ParseError::ParseError(std::size_t line, const std::string& message)
    : Error(ErrorKind::Parse, "line " + std::to_string(line) + ": " + message),
      line_(line) {}

void rethrow_with_stage(std::string_view stage) {
  try {
    throw;
  } catch (const Error& e) {
    throw Error(e.kind(), std::string(stage) + ": " + e.what());
  }
}

}  // namespace wef
