#include "synthrl/minilang/outcome.hpp"

#include <stdexcept>

#include "synthrl/minilang/parser.hpp"

namespace synthrl::minilang {

std::string_view outcome_name(Outcome u) {
  switch (u) {
    case Outcome::CompileError: return "CompileError";
    case Outcome::RuntimeError: return "RuntimeError";
    case Outcome::FailedTest: return "FailedTest";
    case Outcome::PassedTest: return "PassedTest";
  }
  return "?";
}

std::string_view subtype_name(ErrorSubtype c) {
  switch (c) {
    case ErrorSubtype::Syntax: return "syntax";
    case ErrorSubtype::UndefinedVar: return "undefined_var";
    case ErrorSubtype::DivByZero: return "div_by_zero";
    case ErrorSubtype::NoReturn: return "no_return";
    case ErrorSubtype::StepLimit: return "step_limit";
    case ErrorSubtype::WrongAnswer: return "wrong_answer";
    case ErrorSubtype::None: return "none";
  }
  return "?";
}

std::optional<Outcome> outcome_from_name(std::string_view name) {
  for (int i = 0; i < kOutcomeCount; ++i) {
    if (outcome_name(static_cast<Outcome>(i)) == name) return static_cast<Outcome>(i);
  }
  return std::nullopt;
}

std::optional<ErrorSubtype> subtype_from_name(std::string_view name) {
  for (int i = 0; i < kSubtypeCount; ++i) {
    if (subtype_name(static_cast<ErrorSubtype>(i)) == name) return static_cast<ErrorSubtype>(i);
  }
  return std::nullopt;
}

namespace {

ErrorSubtype subtype_of(RuntimeErrorKind kind) {
  switch (kind) {
    case RuntimeErrorKind::UndefinedVar: return ErrorSubtype::UndefinedVar;
    case RuntimeErrorKind::DivByZero: return ErrorSubtype::DivByZero;
    case RuntimeErrorKind::NoReturn: return ErrorSubtype::NoReturn;
    case RuntimeErrorKind::StepLimit: return ErrorSubtype::StepLimit;
  }
  return ErrorSubtype::None;
}

}  // namespace

OutcomeReport evaluate_program(std::span<const Token> tokens,
                               std::span<const TestCase> tests,
                               int step_budget) {
  if (tests.empty()) throw std::invalid_argument("evaluate_program: no tests");

  OutcomeReport report;
  auto parsed = parse(tokens);
  if (std::holds_alternative<ParseError>(parsed)) {
    report.category = Outcome::CompileError;
    report.subtype = ErrorSubtype::Syntax;
    return report;
  }
  const Program& program = std::get<Program>(parsed);

  bool any_error = false;
  ErrorSubtype first_error = ErrorSubtype::None;
  bool any_wrong = false;
  for (const TestCase& test : tests) {
    ExecResult exec_result = execute(program, test, step_budget);
    TestResult tr;
    if (exec_result.ok()) {
      tr.value = exec_result.value;
      if (*exec_result.value != test.expected) any_wrong = true;
    } else {
      tr.error = subtype_of(exec_result.error);
      if (!any_error) {
        any_error = true;
        first_error = tr.error;
      }
    }
    report.per_test.push_back(tr);
  }

  if (any_error) {
    report.category = Outcome::RuntimeError;
    report.subtype = first_error;
  } else if (any_wrong) {
    report.category = Outcome::FailedTest;
    report.subtype = ErrorSubtype::WrongAnswer;
  } else {
    report.category = Outcome::PassedTest;
    report.subtype = ErrorSubtype::None;
  }
  return report;
}

}  // namespace synthrl::minilang
