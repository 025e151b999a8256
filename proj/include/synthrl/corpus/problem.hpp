#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "synthrl/minilang/interpreter.hpp"
#include "synthrl/minilang/token.hpp"

namespace synthrl::corpus {

// One synthesis task: a worded description, a ground-truth program, two
// example tests visible at inference time, and hidden tests that define
// correctness.
struct ProblemSpec {
  std::string id;
  int tier = 1;  // 1 straight-line, 2 conditional, 3 loop
  std::vector<std::string> description;
  std::vector<minilang::TestCase> example_tests;
  std::vector<minilang::TestCase> hidden_tests;
  std::vector<minilang::Token> ground_truth;

  std::vector<minilang::TestCase> all_tests() const {
    std::vector<minilang::TestCase> tests = example_tests;
    tests.insert(tests.end(), hidden_tests.begin(), hidden_tests.end());
    return tests;
  }
};

struct Dataset {
  std::vector<ProblemSpec> problems;
  std::string split = "train";  // train | test
  std::uint64_t generator_seed = 0;
};

}  // namespace synthrl::corpus
