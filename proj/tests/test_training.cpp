#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "support/finite_diff.hpp"
#include "synthrl/corpus/encode.hpp"
#include "synthrl/corpus/generate.hpp"
#include "synthrl/models/repair_input.hpp"
#include "synthrl/training/returns.hpp"
#include "synthrl/training/trainer.hpp"

using namespace synthrl;
using namespace synthrl::training;
using corpus::Vocabulary;
using models::ModelConfig;
using models::Seq2Seq;

namespace {

minilang::OutcomeReport report_of(minilang::Outcome category, minilang::ErrorSubtype subtype) {
  minilang::OutcomeReport report;
  report.category = category;
  report.subtype = subtype;
  return report;
}

ModelConfig small_actor(const Vocabulary& vocab) {
  ModelConfig config = ModelConfig::actor(vocab.size(), /*embed=*/16, /*hidden=*/32);
  config.attn = 16;
  return config;
}

ModelConfig small_critic(const Vocabulary& vocab, int head) {
  ModelConfig config = ModelConfig::critic(vocab.size(), /*embed=*/16, /*hidden=*/32);
  config.attn = 16;
  config.head = head;
  if (head == 2) config.role = "test_critic";
  return config;
}

corpus::Dataset tiny_dataset(int n, std::uint64_t seed) {
  corpus::DatasetConfig config;
  config.problems = n;
  config.seed = seed;
  return corpus::generate_dataset(config);
}

}  // namespace

TEST_CASE("returns map outcome categories to the four scalar values") {
  CHECK(return_of(report_of(minilang::Outcome::CompileError,
                            minilang::ErrorSubtype::Syntax)) == -1.0);
  CHECK(return_of(report_of(minilang::Outcome::RuntimeError,
                            minilang::ErrorSubtype::DivByZero)) == -0.6);
  CHECK(return_of(report_of(minilang::Outcome::FailedTest,
                            minilang::ErrorSubtype::WrongAnswer)) == -0.3);
  CHECK(return_of(report_of(minilang::Outcome::PassedTest,
                            minilang::ErrorSubtype::None)) == 1.0);
}

TEST_CASE("ntp pivots stay within the middle band, clamped") {
  Rng rng(17);
  for (int trial = 0; trial < 200; ++trial) {
    const int pivot = ntp_pivot(20, rng);
    CHECK(pivot >= 2);
    CHECK(pivot <= 18);
  }
  for (int trial = 0; trial < 10; ++trial) CHECK(ntp_pivot(2, rng) == 1);
}

TEST_CASE("pretraining lowers held-out suffix NLL against a random model") {
  Vocabulary vocab;
  Rng data_rng(2024);
  std::vector<std::vector<minilang::Token>> train_programs, heldout_programs;
  for (int i = 0; i < 300; ++i) {
    const int tier = 1 + static_cast<int>(data_rng.uniform_int(0, 2));
    train_programs.push_back(corpus::random_program(tier, data_rng));
  }
  for (int i = 0; i < 60; ++i) {
    const int tier = 1 + static_cast<int>(data_rng.uniform_int(0, 2));
    heldout_programs.push_back(corpus::random_program(tier, data_rng));
  }

  Seq2Seq random_init(small_actor(vocab), 1001);
  Seq2Seq pretrained(small_actor(vocab), 1001);
  TrainConfig config;
  config.epochs_pretrain = 2;
  Rng train_rng(5);
  auto losses = ntp_pretrain(pretrained, vocab, train_programs, config, train_rng);
  REQUIRE(losses.size() == 2);

  Rng eval_a(77), eval_b(77);  // identical pivots for both models
  const double nll_random = suffix_nll(random_init, vocab, heldout_programs, eval_a);
  const double nll_pretrained = suffix_nll(pretrained, vocab, heldout_programs, eval_b);
  CHECK(nll_pretrained < nll_random);
}

TEST_CASE("warm start on one pair makes greedy reproduce it; zero epochs change nothing") {
  Vocabulary vocab;
  corpus::Dataset dataset = tiny_dataset(1, 321);
  TrainConfig config;
  config.epochs_warmstart = 10;
  config.lr_warmstart = 3e-3;
  config.batch_size = 1;

  Seq2Seq actor(small_actor(vocab), 2002);
  Rng rng(9);
  // Rounds of 10 epochs each drive the single pair to convergence.
  for (int round = 0; round < 50; ++round) ce_warmstart(actor, vocab, dataset, config, rng);
  const auto source = corpus::encode_source(vocab, dataset.problems[0].description);
  CHECK(actor.greedy(source, 96) == vocab.ids_of_program(dataset.problems[0].ground_truth));

  Seq2Seq frozen(small_actor(vocab), 2002);
  TrainConfig none = config;
  none.epochs_warmstart = 0;
  Rng rng2(9);
  auto losses = ce_warmstart(frozen, vocab, dataset, none, rng2);
  CHECK(losses.empty());
  Seq2Seq reference(small_actor(vocab), 2002);
  for (std::size_t e = 0; e < frozen.params().entries().size(); ++e) {
    const auto& a = frozen.params().entries()[e].tensor;
    const auto& b = reference.params().entries()[e].tensor;
    for (Eigen::Index i = 0; i < a.size(); ++i) REQUIRE(a.values()[i] == b.values()[i]);
  }

  TrainConfig excessive = config;
  excessive.epochs_warmstart = 11;
  Rng rng3(9);
  CHECK_THROWS_AS(ce_warmstart(actor, vocab, dataset, excessive, rng3), std::invalid_argument);
}

TEST_CASE("warm start loss is non-increasing over the first epochs") {
  Vocabulary vocab;
  corpus::Dataset dataset = tiny_dataset(24, 888);
  TrainConfig config;
  config.epochs_warmstart = 3;
  Seq2Seq actor(small_actor(vocab), 3003);
  Rng rng(13);
  auto losses = ce_warmstart(actor, vocab, dataset, config, rng);
  REQUIRE(losses.size() == 3);
  CHECK(losses[1] <= losses[0]);
  CHECK(losses[2] <= losses[1]);
}

TEST_CASE("collect_synthetic yields (S+1) labeled samples per problem, deterministically") {
  Vocabulary vocab;
  corpus::Dataset dataset = tiny_dataset(4, 777);
  Seq2Seq actor(small_actor(vocab), 4004);
  TrainConfig config;
  config.samples_per_problem = 5;

  Rng r1(55), r2(55);
  auto samples = collect_synthetic(actor, vocab, dataset, config, r1);
  auto again = collect_synthetic(actor, vocab, dataset, config, r2);
  REQUIRE(samples.size() == dataset.problems.size() * 6);
  REQUIRE(again.size() == samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    CHECK(samples[i].program == again[i].program);
    CHECK(samples[i].outcome == again[i].outcome);
    if (samples[i].source == LabeledSample::Source::GroundTruth) {
      CHECK(samples[i].outcome == minilang::Outcome::PassedTest);
      CHECK(samples[i].subtype == minilang::ErrorSubtype::None);
    }
  }
  int truths = 0;
  for (const auto& s : samples) truths += s.source == LabeledSample::Source::GroundTruth;
  CHECK(truths == 4);
}

TEST_CASE("critic loss starts at ln 4 with a zeroed head") {
  Vocabulary vocab;
  corpus::Dataset dataset = tiny_dataset(3, 99);
  Seq2Seq critic(small_critic(vocab, 4), 5005);
  critic.params().get("out.weight").values() = 0.0;
  critic.params().get("out.bias").values() = 0.0;

  const auto source = corpus::encode_source(vocab, dataset.problems[0].description);
  const auto program = vocab.ids_of_program(dataset.problems[0].ground_truth);
  auto out = critic.critic_forward(source, program);
  auto nll = diffkit::cross_entropy(out.pooled_logits, 3);
  CHECK(nll.value() == doctest::Approx(std::log(4.0)).epsilon(1e-12));
}

TEST_CASE("critics train to above-chance held-out accuracy on a small corpus") {
  Vocabulary vocab;
  corpus::Dataset dataset = tiny_dataset(12, 31415);
  Seq2Seq actor(small_actor(vocab), 6006);
  TrainConfig config;
  config.samples_per_problem = 8;
  config.epochs_warmstart = 4;
  Rng rng(21);
  ce_warmstart(actor, vocab, dataset, config, rng);
  auto samples = collect_synthetic(actor, vocab, dataset, config, rng);

  Seq2Seq critic(small_critic(vocab, 4), 6007);
  config.epochs_critic = 6;
  double accuracy = train_critic(critic, vocab, samples, dataset, config, rng);
  CHECK(accuracy >= 0.4);  // well above the 0.25 chance level

  Seq2Seq test_critic(small_critic(vocab, 2), 6008);
  double binary_accuracy = train_test_critic(test_critic, vocab, samples, dataset, config, rng);
  CHECK(binary_accuracy >= 0.5);

  CHECK_THROWS_AS(train_critic(test_critic, vocab, samples, dataset, config, rng),
                  std::invalid_argument);
}

TEST_CASE("rl surrogate loss gradient matches finite differences on a frozen toy") {
  ModelConfig config = ModelConfig::actor(4, /*embed=*/3, /*hidden=*/4);
  config.attn = 3;
  Seq2Seq actor(config, 7007);
  const std::vector<int> source = {1, 3, 2};
  const std::vector<int> sampled = {3, 3};
  const std::vector<double> values = {0.7, 0.4};
  const double advantage = 1.3;
  auto report = testsupport::finite_diff_check(actor.params(), [&] {
    return rl_surrogate_loss(actor, source, sampled, values, advantage);
  });
  CHECK_MESSAGE(report.max_rel_err <= 1e-6,
                "worst=" << report.worst_param << " err=" << report.max_rel_err);
}

TEST_CASE("zero advantage produces no rl loss term at all") {
  Vocabulary vocab;
  Seq2Seq actor(small_actor(vocab), 8008);
  TrainConfig config;
  Rng rng(3);
  // Outcome independent of the program: sample and greedy returns match.
  OutcomeFn constant_outcome = [](std::span<const int>) {
    return minilang::OutcomeReport{minilang::Outcome::FailedTest,
                                   minilang::ErrorSubtype::WrongAnswer,
                                   {}};
  };
  const std::vector<int> source = {1, 20, 2};
  const std::vector<int> target = {17};
  diffkit::Tape tape;
  auto losses = rl_losses(actor, nullptr, source, target, constant_outcome, config, rng);
  CHECK(losses.advantage == 0.0);
  CHECK_FALSE(losses.loss_rl.defined());
  tape.backward(losses.loss_ce);  // the CE term still trains
}

TEST_CASE("advantage arithmetic: sample passes while baseline fails a test") {
  Vocabulary vocab;
  Seq2Seq actor(small_actor(vocab), 8009);
  TrainConfig config;
  config.critic_mode = CriticMode::Constant;
  Rng rng(3);
  bool first = true;
  OutcomeFn outcome = [&first](std::span<const int>) {
    // The sampled program is evaluated before the greedy baseline.
    if (first) {
      first = false;
      return minilang::OutcomeReport{minilang::Outcome::PassedTest,
                                     minilang::ErrorSubtype::None,
                                     {}};
    }
    return minilang::OutcomeReport{minilang::Outcome::FailedTest,
                                   minilang::ErrorSubtype::WrongAnswer,
                                   {}};
  };
  const std::vector<int> source = {1, 20, 2};
  const std::vector<int> target = {17};
  diffkit::Tape tape;
  auto losses = rl_losses(actor, nullptr, source, target, outcome, config, rng);
  CHECK(losses.advantage == doctest::Approx(1.3).epsilon(1e-12));
}

TEST_CASE("no gradient from the rl loss reaches critic parameters") {
  Vocabulary vocab;
  Seq2Seq actor(small_actor(vocab), 9009);
  Seq2Seq critic(small_critic(vocab, 4), 9010);
  TrainConfig config;
  config.critic_mode = CriticMode::Learned;
  config.rl_baseline = false;  // keeps the advantage away from zero
  Rng rng(6);
  OutcomeFn harsh = [](std::span<const int> program) {
    if (program.empty()) {
      return minilang::OutcomeReport{minilang::Outcome::PassedTest,
                                     minilang::ErrorSubtype::None,
                                     {}};
    }
    return minilang::OutcomeReport{minilang::Outcome::FailedTest,
                                   minilang::ErrorSubtype::WrongAnswer,
                                   {}};
  };
  const std::vector<int> source = {1, 20, 2};
  const std::vector<int> target = {17, 18};
  bool saw_rl_term = false;
  for (int trial = 0; trial < 20; ++trial) {
    diffkit::Tape tape;
    auto losses = rl_losses(actor, &critic, source, target, harsh, config, rng);
    diffkit::Tensor total = losses.loss_ce;
    if (losses.loss_rl.defined()) {
      saw_rl_term = true;
      total = diffkit::add(total, losses.loss_rl);
    }
    tape.backward(total);
    for (const auto& entry : critic.params().entries()) {
      REQUIRE_FALSE(entry.tensor.has_grad());
    }
    actor.params().drop_grads();
  }
  CHECK(saw_rl_term);
}

TEST_CASE("bandit: rl pushes probability onto the one passing token") {
  // Five-id vocabulary (pad, bos, eos, two program tokens); exactly one
  // single-token program passes.
  const int target_token = 3;
  OutcomeFn bandit = [&](std::span<const int> program) {
    if (program.size() == 1 && program[0] == target_token) {
      return minilang::OutcomeReport{minilang::Outcome::PassedTest,
                                     minilang::ErrorSubtype::None,
                                     {}};
    }
    return minilang::OutcomeReport{minilang::Outcome::FailedTest,
                                   minilang::ErrorSubtype::WrongAnswer,
                                   {}};
  };

  TrainConfig config;
  config.critic_mode = CriticMode::Constant;  // ablation without a critic
  config.rl_baseline = true;
  config.weight_ce = 0.0;  // isolate the policy-gradient direction
  config.lr_rl = 0.01;
  config.max_program_len = 1;

  const std::vector<int> source = {1, 4, 2};
  const std::vector<int> target = {target_token};

  double before_sum = 0.0, after_sum = 0.0;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    ModelConfig mc = ModelConfig::actor(5, 8, 12);
    mc.attn = 6;
    Seq2Seq actor(mc, 111 * seed);
    Rng rng(seed);
    auto p_target = [&] {
      return std::exp(actor.log_prob(source, target).token_logp[0]);
    };
    before_sum += p_target();
    for (int step = 0; step < 200; ++step) {
      diffkit::Tape tape;
      auto losses = rl_losses(actor, nullptr, source, target, bandit, config, rng);
      diffkit::Tensor total = diffkit::scale(losses.loss_ce, 0.0);
      if (losses.loss_rl.defined()) total = diffkit::add(total, losses.loss_rl);
      tape.backward(total);
      diffkit::adam_step(actor.params(), config.lr_rl);
    }
    after_sum += p_target();
  }
  CHECK(after_sum / 5.0 > before_sum / 5.0);
}

TEST_CASE("repair training consumes only failing samples and lowers its loss") {
  Vocabulary vocab;
  corpus::Dataset dataset = tiny_dataset(8, 2718);
  Seq2Seq actor(small_actor(vocab), 1100);
  TrainConfig config;
  config.samples_per_problem = 6;
  Rng rng(77);
  auto samples = collect_synthetic(actor, vocab, dataset, config, rng);

  int failing = 0;
  for (const auto& s : samples) failing += s.outcome != minilang::Outcome::PassedTest;
  REQUIRE(failing > 0);  // a random actor mostly fails

  Seq2Seq repair_model(small_actor(vocab), 1101);
  config.epochs_repair = 3;
  auto losses = train_repair(repair_model, vocab, samples, dataset, config, rng);
  REQUIRE(losses.size() == 3);
  CHECK(losses[2] < losses[0]);
}

TEST_CASE("an overfitted repair model greedily emits the fix") {
  Vocabulary vocab;
  corpus::Dataset dataset = tiny_dataset(1, 1618);
  const corpus::ProblemSpec& problem = dataset.problems[0];

  LabeledSample broken;
  broken.problem_id = problem.id;
  broken.program = {*vocab.id_of("return"), *vocab.id_of("0")};
  broken.outcome = minilang::Outcome::FailedTest;
  broken.subtype = minilang::ErrorSubtype::WrongAnswer;
  std::vector<LabeledSample> samples = {broken};

  ModelConfig mc = ModelConfig::repair(vocab.size(), 16, 32);
  mc.attn = 16;
  Seq2Seq repair_model(mc, 1102);
  TrainConfig config;
  config.epochs_repair = 500;
  config.lr_repair = 3e-3;
  config.batch_size = 1;
  Rng rng(5);
  train_repair(repair_model, vocab, samples, dataset, config, rng);

  const auto input = models::repair_input(vocab, vocab.ids_of(problem.description),
                                          broken.program, broken.outcome, broken.subtype);
  CHECK(repair_model.greedy(input, 96) == vocab.ids_of_program(problem.ground_truth));
}
