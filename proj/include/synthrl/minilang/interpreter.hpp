#pragma once

#include <cstdint>
#include <optional>

#include "synthrl/minilang/ast.hpp"

namespace synthrl::minilang {

// One synthesis unit test: all three input variables are always bound.
struct TestCase {
  std::int64_t a = 0;
  std::int64_t b = 0;
  std::int64_t c = 0;
  std::int64_t expected = 0;
};

enum class RuntimeErrorKind { UndefinedVar, DivByZero, NoReturn, StepLimit };

struct ExecResult {
  std::optional<std::int64_t> value;  // set iff the program returned
  RuntimeErrorKind error = RuntimeErrorKind::NoReturn;

  bool ok() const { return value.has_value(); }
};

inline constexpr int kDefaultStepBudget = 10000;
inline constexpr std::int64_t kLoopClampMax = 100;

// Sequential evaluation with 64-bit two's-complement wrapping arithmetic.
// '/' truncates toward zero. Loop counts are evaluated once and clamped to
// [0, 100]. Step accounting, fixed so that independent evaluators agree
// exactly:
//   - each statement charges one step when execution reaches it, before
//     its expressions evaluate;
//   - variable reads and literals charge one step when evaluated;
//   - a binary operation charges one step after both operands have
//     evaluated, before the operator applies (and before its own error
//     checks, e.g. a zero divisor);
//   - parentheses and comparisons charge nothing.
// The first charge that pushes the count past step_budget aborts with
// StepLimit. Reading an unbound variable (x, y, z before assignment)
// aborts with UndefinedVar; a zero divisor with DivByZero; running out of
// statements without 'return' yields NoReturn.
ExecResult execute(const Program& program, const TestCase& test,
                   int step_budget = kDefaultStepBudget);

}  // namespace synthrl::minilang
