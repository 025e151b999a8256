#pragma once

// Independent reference evaluator for the mini language, written directly
// from the grammar as a fused parse-and-evaluate pass over the token
// stream (no AST). Used only by tests to cross-check the production
// interpreter; it shares nothing with it beyond the public token and
// report types.

#include <span>

#include "synthrl/minilang/outcome.hpp"
#include "synthrl/minilang/token.hpp"

namespace synthrl::testsupport {

// Same aggregation contract as the production pipeline: parse failure ->
// CompileError; otherwise first runtime error in test order; otherwise any
// mismatch -> FailedTest; else PassedTest.
minilang::OutcomeReport oracle_evaluate(std::span<const minilang::Token> tokens,
                                        std::span<const minilang::TestCase> tests,
                                        int step_budget = minilang::kDefaultStepBudget);

}  // namespace synthrl::testsupport
