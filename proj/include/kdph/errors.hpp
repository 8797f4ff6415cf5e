// kdph: persistent homology for the k-distance under random projections.
// Released under the Apache License, Version 2.0
// (http://www.apache.org/licenses/LICENSE-2.0).

#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace kdph {

// Violated precondition or type invariant. Callers get the full message;
// nothing is recoverable about these, they indicate a caller bug.
class ContractViolation : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A combinatorial enumeration would exceed the caller-supplied budget.
class BudgetExceeded : public std::runtime_error {
 public:
  BudgetExceeded(const std::string& what, std::uint64_t required,
                 std::uint64_t budget)
      : std::runtime_error(what), required(required), budget(budget) {}

  std::uint64_t required;
  std::uint64_t budget;
};

// Malformed input data. `line` is 1-based, 0 when not tied to a line.
class ParseError : public std::runtime_error {
 public:
  explicit ParseError(const std::string& what, int line = 0)
      : std::runtime_error(what), line(line) {}

  int line;
};

}  // namespace kdph
