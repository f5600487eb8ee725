#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace simon {

// Argument outside the mathematical domain of an operation (p0 not in (0,1),
// rho <= 0, x < 1, ...).
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Requested month or index lies outside the observed range.
class RangeError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

// Input is well formed but carries no information for the requested estimate
// (all-singleton histogram, too few points, empty window).
class DegenerateInputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Iterative estimation hit its cap. best_point holds the best parameter seen.
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, double best_point)
      : std::runtime_error(what), best_point_(best_point) {}
  double best_point() const noexcept { return best_point_; }

 private:
  double best_point_;
};

struct RowError {
  std::size_t line = 0;
  std::string message;
};

// Malformed rows in an input file; every offending line is reported.
class ParseError : public std::runtime_error {
 public:
  explicit ParseError(std::vector<RowError> errors);
  const std::vector<RowError>& errors() const noexcept { return errors_; }

 private:
  std::vector<RowError> errors_;
};

}  // namespace simon
