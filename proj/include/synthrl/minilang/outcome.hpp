#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "synthrl/minilang/interpreter.hpp"
#include "synthrl/minilang/token.hpp"

namespace synthrl::minilang {

// Aggregated unit-test outcome. Index order is fixed; classifier heads and
// return values depend on it.
enum class Outcome : int {
  CompileError = 0,
  RuntimeError = 1,
  FailedTest = 2,
  PassedTest = 3,
};

enum class ErrorSubtype : int {
  Syntax = 0,
  UndefinedVar = 1,
  DivByZero = 2,
  NoReturn = 3,
  StepLimit = 4,
  WrongAnswer = 5,
  None = 6,
};

inline constexpr int kOutcomeCount = 4;
inline constexpr int kSubtypeCount = 7;

std::string_view outcome_name(Outcome u);
std::string_view subtype_name(ErrorSubtype c);
std::optional<Outcome> outcome_from_name(std::string_view name);
std::optional<ErrorSubtype> subtype_from_name(std::string_view name);

struct TestResult {
  std::optional<std::int64_t> value;                     // set iff no runtime error
  ErrorSubtype error = ErrorSubtype::None;

  bool ok() const { return value.has_value(); }
};

struct OutcomeReport {
  Outcome category = Outcome::CompileError;
  ErrorSubtype subtype = ErrorSubtype::Syntax;
  std::vector<TestResult> per_test;  // empty when the program failed to parse
};

// Pure aggregation: parse failure dominates, then the first runtime error
// in test order, then any mismatched value, else PassedTest.
OutcomeReport evaluate_program(std::span<const Token> tokens,
                               std::span<const TestCase> tests,
                               int step_budget = kDefaultStepBudget);

}  // namespace synthrl::minilang
