#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace imot {

/// Thrown by solvers when the input cannot determine a unique solution
/// (collinear points, rank-deficient systems, ambiguous SO(3) projection).
class DegenerateInput : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Base class for failures of a robust estimation run. Carries the outer
/// iteration at which the failure happened (0 when not tied to an iteration).
class EstimationError : public std::runtime_error {
 public:
  EstimationError(const std::string& what, int iteration)
      : std::runtime_error(what), iteration_(iteration) {}

  int iteration() const noexcept { return iteration_; }

 private:
  int iteration_;
};

class InsufficientInliers : public EstimationError {
 public:
  using EstimationError::EstimationError;
};

class SolverFailure : public EstimationError {
 public:
  using EstimationError::EstimationError;
};

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace imot
