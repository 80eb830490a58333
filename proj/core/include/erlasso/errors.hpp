#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace erlasso {

// Invalid argument / precondition violation (dimension mismatch, bad range).
struct ParameterError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Numerical conditioning failure (non-PD Cholesky, singular preconditioner).
struct ConditioningError : std::runtime_error {
  explicit ConditioningError(const std::string& what, std::int64_t pivot = -1)
      : std::runtime_error(what), pivot_index(pivot) {}
  std::int64_t pivot_index;  // offending pivot/index when known, else -1
};

// Exhaustive enumeration would exceed the configured budget.
struct BudgetError : std::runtime_error {
  BudgetError(const std::string& what, std::int64_t required_, std::int64_t budget_)
      : std::runtime_error(what), required(required_), budget(budget_) {}
  std::int64_t required;
  std::int64_t budget;
};

// Unparseable input file; line is 1-based.
struct ParseError : std::runtime_error {
  ParseError(const std::string& what, std::int64_t line_)
      : std::runtime_error(what), line(line_) {}
  std::int64_t line;
};

}  // namespace erlasso
