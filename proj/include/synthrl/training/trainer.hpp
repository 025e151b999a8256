#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "synthrl/corpus/generate.hpp"
#include "synthrl/corpus/vocabulary.hpp"
#include "synthrl/models/seq2seq.hpp"
#include "synthrl/training/config.hpp"
#include "synthrl/training/metrics_log.hpp"

namespace synthrl::training {

// One program with its observed unit-test outcome, used to train the
// critics and the repair model. Ground-truth entries always carry
// PassedTest.
struct LabeledSample {
  std::string problem_id;
  std::vector<int> program;  // vocabulary ids, no specials
  minilang::Outcome outcome = minilang::Outcome::PassedTest;
  minilang::ErrorSubtype subtype = minilang::ErrorSubtype::None;
  enum class Source { Sampled, GroundTruth } source = Source::Sampled;
};

// Pivot position for a program of the given length: uniform over the
// middle 10%..90%, clamped to [1, length-1].
int ntp_pivot(int length, Rng& rng);

// Pivot-split pretraining: the tokens before a pivot drawn from the middle
// 10%..90% of each program feed the encoder, the rest are the decoder
// target. Programs shorter than two tokens are skipped. Returns per-epoch
// mean losses.
std::vector<double> ntp_pretrain(models::Seq2Seq& actor, const corpus::Vocabulary& vocab,
                  std::span<const std::vector<minilang::Token>> programs,
                  const TrainConfig& config, Rng& rng, MetricsLog* log = nullptr);

// Mean held-out per-token negative log-likelihood of program suffixes
// under the pivot-split scheme (the pretraining quality probe).
double suffix_nll(const models::Seq2Seq& actor, const corpus::Vocabulary& vocab,
                  std::span<const std::vector<minilang::Token>> programs, Rng& rng);

// Supervised warm start on (description, program) pairs; at most 10
// epochs. Returns per-epoch mean losses.
std::vector<double> ce_warmstart(models::Seq2Seq& actor, const corpus::Vocabulary& vocab,
                  const corpus::Dataset& dataset, const TrainConfig& config, Rng& rng,
                  MetricsLog* log = nullptr);

// Draws S samples per problem from the frozen actor, labels them against
// the hidden tests, and appends each problem's ground truth as a
// PassedTest sample. |result| = |problems| * (S + 1).
std::vector<LabeledSample> collect_synthetic(const models::Seq2Seq& actor,
                                             const corpus::Vocabulary& vocab,
                                             const corpus::Dataset& dataset,
                                             const TrainConfig& config, Rng& rng);

// Four-class outcome critic; returns held-out accuracy on a 90/10 split.
double train_critic(models::Seq2Seq& critic, const corpus::Vocabulary& vocab,
                    std::span<const LabeledSample> samples, const corpus::Dataset& dataset,
                    const TrainConfig& config, Rng& rng, MetricsLog* log = nullptr);

// Binary pass/fail variant on the same samples.
double train_test_critic(models::Seq2Seq& test_critic, const corpus::Vocabulary& vocab,
                         std::span<const LabeledSample> samples,
                         const corpus::Dataset& dataset, const TrainConfig& config,
                         Rng& rng, MetricsLog* log = nullptr);

// The critic-weighted policy-gradient surrogate for a fixed sampled
// program: advantage * sum_t q[t] * nll[t], taken over the sampled tokens.
// q carries no gradient.
diffkit::Tensor rl_surrogate_loss(const models::Seq2Seq& actor, std::span<const int> source,
                                  std::span<const int> sampled_tokens,
                                  std::span<const double> token_values, double advantage);

// Maps a candidate program (vocabulary ids) to its aggregated outcome;
// injectable so tests can run bandit-style environments.
using OutcomeFn = std::function<minilang::OutcomeReport(std::span<const int>)>;

struct RlLosses {
  diffkit::Tensor loss_ce;  // always defined
  diffkit::Tensor loss_rl;  // undefined handle when the RL term is exactly zero
  double advantage = 0.0;
  double sample_return = 0.0;
  double baseline_return = 0.0;
  minilang::Outcome sample_outcome = minilang::Outcome::CompileError;
};

// One problem's losses: samples W^s, decodes the greedy baseline W^b,
// evaluates both, weights the sampled tokens by the critic's values for
// the observed outcome, and builds L_rl plus the ground-truth L_ce.
RlLosses rl_losses(const models::Seq2Seq& actor, const models::Seq2Seq* critic,
                   std::span<const int> source, std::span<const int> ground_truth,
                   const OutcomeFn& outcome_of, const TrainConfig& config, Rng& rng);

struct RlStepResult {
  double loss_ce = 0.0;
  double loss_rl = 0.0;
  double advantage = 0.0;
};

// rl_losses + one optimizer step on w_ce * L_ce + w_rl * L_rl.
RlStepResult rl_step(models::Seq2Seq& actor, const models::Seq2Seq* critic,
                     const corpus::ProblemSpec& problem, const corpus::Vocabulary& vocab,
                     const TrainConfig& config, Rng& rng);

struct RlEpochStats {
  double loss_ce = 0.0;
  double loss_rl = 0.0;
  double mean_advantage = 0.0;
  double sample_pass_rate = 0.0;
};

// Full finetuning pass over the dataset, batched over problems.
std::vector<RlEpochStats> rl_finetune(models::Seq2Seq& actor, const models::Seq2Seq* critic,
                 const corpus::Vocabulary& vocab, const corpus::Dataset& dataset,
                 const TrainConfig& config, Rng& rng, MetricsLog* log = nullptr);

// Error-conditioned repair training: failing samples in, ground truth
// out. Returns per-epoch mean losses.
std::vector<double> train_repair(models::Seq2Seq& repair_model, const corpus::Vocabulary& vocab,
                  std::span<const LabeledSample> samples, const corpus::Dataset& dataset,
                  const TrainConfig& config, Rng& rng, MetricsLog* log = nullptr);

}  // namespace synthrl::training
