#pragma once

// Random token sequences and tests for interpreter agreement checks. The
// generator deliberately produces the full outcome spectrum: token soup and
// mutations (syntax errors), reads of unassigned variables, division and
// modulo (zero divisors), missing returns, deeply nested loops (step-limit
// overruns), and programs whose expected outputs are taken from the oracle
// so that PassedTest occurs.

#include <vector>

#include "synthrl/minilang/interpreter.hpp"
#include "synthrl/minilang/token.hpp"
#include "synthrl/rng.hpp"

namespace synthrl::testsupport {

std::vector<minilang::Token> random_test_program(Rng& rng);

// Inputs in [-9, 9]; expected values are independent random draws unless
// `oracle_expected` is set, in which case the caller overwrites them.
std::vector<minilang::TestCase> random_test_inputs(Rng& rng, int count);

}  // namespace synthrl::testsupport
