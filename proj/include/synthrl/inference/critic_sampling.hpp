#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "synthrl/corpus/problem.hpp"
#include "synthrl/corpus/vocabulary.hpp"
#include "synthrl/models/seq2seq.hpp"

namespace synthrl::inference {

struct ProgramCandidate {
  std::vector<int> tokens;            // vocabulary ids, no specials
  double mean_logp = 0.0;             // per-token log-likelihood under the actor
  double critic_score = 0.0;          // test-critic PassedTest probability
  minilang::OutcomeReport example_report;

  bool passes_examples() const {
    return example_report.category == minilang::Outcome::PassedTest;
  }
};

struct GenerationBatch {
  std::string problem_id;
  std::vector<ProgramCandidate> programs;  // exactly N at every stage boundary
};

enum class CsMode { Off, Refine, RefineRepair };

struct CsConfig {
  int n = 20;  // samples per problem
  int m = 1;   // repair candidates taken from a completely failed batch
  double temperature = 0.8;
  double top_p = 0.95;
  int max_len = 94;
  CsMode mode = CsMode::RefineRepair;
};

// Optional per-problem trace: one JSON record per pipeline event.
using TraceSink = std::function<void(const nlohmann::json&)>;

// Evaluates a candidate against the example tests and attaches its actor
// likelihood and test-critic score.
ProgramCandidate make_candidate(const models::Seq2Seq& actor,
                                const models::Seq2Seq& test_critic,
                                const corpus::Vocabulary& vocab,
                                const corpus::ProblemSpec& problem,
                                std::vector<int> tokens);

// N nucleus samples, each scored and evaluated against example tests only.
GenerationBatch generate_batch(const models::Seq2Seq& actor,
                               const models::Seq2Seq& test_critic,
                               const corpus::Vocabulary& vocab,
                               const corpus::ProblemSpec& problem, const CsConfig& config,
                               Rng& rng);

// Chop rule over prefix pass-probabilities: split at the highest value
// (ties toward the smaller position), truncate before the first position
// whose fail probability dominates (p < 0.5), and keep the result a strict
// prefix. Returns the kept prefix length; zero means regenerate from
// scratch.
std::size_t select_seed_prefix(std::span<const double> pass_values);

// The seed tokens for one example-passing program.
std::vector<int> select_seed(const models::Seq2Seq& test_critic,
                             std::span<const int> source, std::span<const int> program);

// Floor copies for every seed, one extra for each of the highest-scoring
// remainder winners (ties by tiebreak value, then input order). Sums to n.
std::vector<int> upsample_counts(int n, std::span<const double> scores,
                                 std::span<const double> tiebreak);

// Seeds from every member of the passing set, upsampled back to N
// continuations. The passing set must be non-empty.
std::vector<ProgramCandidate> refine(const models::Seq2Seq& actor,
                                     const models::Seq2Seq& test_critic,
                                     const corpus::Vocabulary& vocab,
                                     const corpus::ProblemSpec& problem,
                                     std::span<const ProgramCandidate> passing,
                                     const CsConfig& config, Rng& rng,
                                     const TraceSink* trace = nullptr);

// Complete-failure path: rank the failed batch by test-critic score, keep
// the top M, and regenerate N programs from the repair model conditioned
// on each candidate's description, program and error tags.
std::vector<ProgramCandidate> repair(const models::Seq2Seq& actor,
                                     const models::Seq2Seq& repair_model,
                                     const models::Seq2Seq& test_critic,
                                     const corpus::Vocabulary& vocab,
                                     const corpus::ProblemSpec& problem,
                                     std::span<const ProgramCandidate> failed,
                                     const CsConfig& config, Rng& rng,
                                     const TraceSink* trace = nullptr);

// The full generation procedure: sample, partition on example tests,
// refine the passing set, or repair-then-refine on complete failure.
// Every branch returns exactly N programs. The repair model may be null
// unless the mode is RefineRepair.
GenerationBatch critic_sampling(const models::Seq2Seq& actor,
                                const models::Seq2Seq& test_critic,
                                const models::Seq2Seq* repair_model,
                                const corpus::Vocabulary& vocab,
                                const corpus::ProblemSpec& problem, const CsConfig& config,
                                Rng& rng, const TraceSink* trace = nullptr);

}  // namespace synthrl::inference
