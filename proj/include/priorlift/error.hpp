#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace priorlift {

enum class ErrorCode {
  Parse,
  Schema,
  InvalidDataset,
  Range,
  Shape,
  Io,
  Convergence,
  SingularDesign,
  DegenerateClass,
  SingularInformation,
  DegeneratePrior,
  EmptyRegion,
  Coverage,
  Config,
};

const char* to_string(ErrorCode code);

/// Base exception for every failure raised by the library. The code is what
/// the C API and the CLI exit-status mapping key on; the message is for humans.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// One IRLS iteration as recorded in a convergence error.
struct IterationTrace {
  int iteration = 0;
  double deviance = 0.0;
  double score_norm = 0.0;
  int step_halvings = 0;
};

class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& message, std::vector<IterationTrace> trace)
      : Error(ErrorCode::Convergence, message), trace_(std::move(trace)) {}

  const std::vector<IterationTrace>& trace() const noexcept { return trace_; }

 private:
  std::vector<IterationTrace> trace_;
};

}  // namespace priorlift
