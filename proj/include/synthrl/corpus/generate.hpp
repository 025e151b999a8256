#pragma once

#include <stdexcept>
#include <vector>

#include "synthrl/corpus/problem.hpp"
#include "synthrl/rng.hpp"

namespace synthrl::corpus {

struct GenerationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A random standalone program of the given tier (used for the pretraining
// corpus and as the backbone of generate_problem). Tier 1 is a single
// return of a random expression, tier 2 a two-branch conditional, tier 3 a
// loop accumulating into x.
std::vector<minilang::Token> random_program(int tier, Rng& rng);

// Draws a full problem: program, description, two example tests and 5-10
// hidden tests with pairwise-distinct inputs, expected outputs computed by
// executing the ground truth. Redraws until the tests are collision-free,
// runtime-error-free and discriminative (the trivial "return 0" must not
// pass all hidden tests). Throws GenerationError when the retry budget is
// exhausted.
ProblemSpec generate_problem(int tier, Rng& rng);

struct DatasetConfig {
  int problems = 200;
  double tier1_frac = 0.6;
  double tier2_frac = 0.3;
  double tier3_frac = 0.1;
  std::string split = "train";
  std::uint64_t seed = 13;
};

Dataset generate_dataset(const DatasetConfig& config);

}  // namespace synthrl::corpus
