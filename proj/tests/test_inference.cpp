#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "synthrl/corpus/encode.hpp"
#include "synthrl/corpus/generate.hpp"
#include "synthrl/inference/critic_sampling.hpp"

using namespace synthrl;
using namespace synthrl::inference;
using corpus::Vocabulary;
using models::ModelConfig;
using models::Seq2Seq;

namespace {

struct Fixture {
  Vocabulary vocab;
  corpus::Dataset dataset;
  Seq2Seq actor;
  Seq2Seq test_critic;
  Seq2Seq repair_model;

  Fixture()
      : dataset(make_dataset()),
        actor(make_actor(vocab), 501),
        test_critic(make_critic(vocab), 502),
        repair_model(make_actor(vocab), 503) {}

  static corpus::Dataset make_dataset() {
    corpus::DatasetConfig config;
    config.problems = 3;
    config.seed = 4321;
    return corpus::generate_dataset(config);
  }

  static ModelConfig make_actor(const Vocabulary& vocab) {
    ModelConfig config = ModelConfig::actor(vocab.size(), 12, 16);
    config.attn = 8;
    return config;
  }

  static ModelConfig make_critic(const Vocabulary& vocab) {
    ModelConfig config = ModelConfig::test_critic(vocab.size(), 12, 16);
    config.attn = 8;
    return config;
  }
};

}  // namespace

TEST_CASE("seed selection follows the argmax and chop rules") {
  CHECK(select_seed_prefix(std::vector<double>{0.6, 0.9, 0.7}) == 2);
  CHECK(select_seed_prefix(std::vector<double>{0.6, 0.3, 0.8}) == 1);
  CHECK(select_seed_prefix(std::vector<double>{0.4, 0.9, 0.9}) == 0);
  // The argmax position itself may be chopped away.
  CHECK(select_seed_prefix(std::vector<double>{0.7, 0.45, 0.9}) == 1);
  // Ties resolve to the earlier position.
  CHECK(select_seed_prefix(std::vector<double>{0.8, 0.8, 0.6}) == 1);
  // A full-length winner is trimmed to stay a strict prefix.
  CHECK(select_seed_prefix(std::vector<double>{0.6, 0.9}) == 1);
  CHECK(select_seed_prefix(std::vector<double>{0.9}) == 0);
}

TEST_CASE("upsampling distributes floor counts plus best-first extras") {
  const std::vector<double> scores = {0.9, 0.5, 0.7};
  const std::vector<double> tiebreak = {0.0, 0.0, 0.0};
  auto counts = upsample_counts(20, scores, tiebreak);
  CHECK(counts == std::vector<int>{7, 6, 7});  // extras to 0.9 and 0.7

  auto one_each = upsample_counts(20, std::vector<double>(20, 0.5),
                                  std::vector<double>(20, 0.0));
  for (int c : one_each) CHECK(c == 1);

  // Score ties break on the tiebreak value.
  auto tied = upsample_counts(5, std::vector<double>{0.5, 0.5, 0.5},
                              std::vector<double>{0.1, 0.3, 0.2});
  CHECK(tied == std::vector<int>{1, 2, 2});
}

TEST_CASE("generate_batch emits N evaluated candidates deterministically") {
  Fixture f;
  CsConfig config;
  config.n = 8;
  Rng r1(42), r2(42);
  auto a = generate_batch(f.actor, f.test_critic, f.vocab, f.dataset.problems[0], config, r1);
  auto b = generate_batch(f.actor, f.test_critic, f.vocab, f.dataset.problems[0], config, r2);
  REQUIRE(a.programs.size() == 8);
  REQUIRE(b.programs.size() == 8);
  int passing = 0, failing = 0;
  for (std::size_t i = 0; i < a.programs.size(); ++i) {
    CHECK(a.programs[i].tokens == b.programs[i].tokens);
    CHECK(a.programs[i].critic_score == b.programs[i].critic_score);
    (a.programs[i].passes_examples() ? passing : failing) += 1;
  }
  CHECK(passing + failing == 8);  // the partition covers the batch
}

TEST_CASE("refined programs extend their seeds verbatim, N outputs") {
  Fixture f;
  const corpus::ProblemSpec& problem = f.dataset.problems[0];
  const auto source = corpus::encode_source(f.vocab, problem.description);

  // The ground truth passes its own example tests, so it forms a valid
  // passing set of one.
  auto candidate = make_candidate(f.actor, f.test_critic, f.vocab, problem,
                                  f.vocab.ids_of_program(problem.ground_truth));
  REQUIRE(candidate.passes_examples());

  const auto seed = select_seed(f.test_critic, source, candidate.tokens);
  CHECK(seed.size() < candidate.tokens.size());  // strict prefix

  CsConfig config;
  config.n = 9;
  Rng rng(7);
  const std::vector<ProgramCandidate> passing = {candidate};
  auto refined = refine(f.actor, f.test_critic, f.vocab, problem, passing, config, rng);
  REQUIRE(refined.size() == 9);
  for (const auto& r : refined) {
    REQUIRE(r.tokens.size() >= seed.size());
    for (std::size_t i = 0; i < seed.size(); ++i) CHECK(r.tokens[i] == seed[i]);
  }
}

TEST_CASE("repair ranks by critic score and regenerates N candidates") {
  Fixture f;
  const corpus::ProblemSpec& problem = f.dataset.problems[1];
  CsConfig config;
  config.n = 6;
  config.m = 2;
  Rng rng(11);
  auto batch = generate_batch(f.actor, f.test_critic, f.vocab, problem, config, rng);
  // An untrained actor fails the example tests on this problem.
  std::vector<ProgramCandidate> failing;
  for (const auto& c : batch.programs) {
    if (!c.passes_examples()) failing.push_back(c);
  }
  REQUIRE(failing.size() == 6);

  auto repaired = repair(f.actor, f.repair_model, f.test_critic, f.vocab, problem, failing,
                         config, rng);
  CHECK(repaired.size() == 6);

  CsConfig too_many = config;
  too_many.m = 7;
  CHECK_THROWS_AS(repair(f.actor, f.repair_model, f.test_critic, f.vocab, problem, failing,
                         too_many, rng),
                  std::invalid_argument);
}

TEST_CASE("critic_sampling returns exactly N on every branch") {
  Fixture f;
  Rng rng(13);
  for (CsMode mode : {CsMode::Off, CsMode::Refine, CsMode::RefineRepair}) {
    for (const auto& problem : f.dataset.problems) {
      CsConfig config;
      config.n = 7;
      config.mode = mode;
      auto batch = critic_sampling(f.actor, f.test_critic, &f.repair_model, f.vocab, problem,
                                   config, rng);
      CHECK(batch.programs.size() == 7);
      CHECK(batch.problem_id == problem.id);
    }
  }
}

TEST_CASE("repair only runs on complete example-test failure") {
  Fixture f;
  CsConfig config;
  config.n = 5;
  config.mode = CsMode::RefineRepair;

  std::vector<std::string> stages;
  int first_partition_passing = -1;
  TraceSink sink = [&](const nlohmann::json& record) {
    const std::string stage = record.at("stage").get<std::string>();
    if (stage == "partition") {
      CHECK(record.at("passing").get<int>() + record.at("failing").get<int>() == 5);
      if (first_partition_passing < 0) {
        first_partition_passing = record.at("passing").get<int>();
      }
    }
    stages.push_back(stage);
  };

  Rng rng(17);
  bool saw_complete_failure = false;
  for (const auto& problem : f.dataset.problems) {
    stages.clear();
    first_partition_passing = -1;
    critic_sampling(f.actor, f.test_critic, &f.repair_model, f.vocab, problem, config, rng,
                    &sink);
    REQUIRE(first_partition_passing >= 0);
    const bool repaired = std::find(stages.begin(), stages.end(), "repair") != stages.end();
    if (first_partition_passing > 0) {
      CHECK_FALSE(repaired);  // branch exclusivity
    } else {
      CHECK(repaired);
      saw_complete_failure = true;
    }
  }
  // An untrained actor must produce at least one complete failure here.
  CHECK(saw_complete_failure);
}

TEST_CASE("deterministic pipeline under a fixed seed") {
  Fixture f;
  CsConfig config;
  config.n = 6;
  Rng r1(19), r2(19);
  auto a = critic_sampling(f.actor, f.test_critic, &f.repair_model, f.vocab,
                           f.dataset.problems[2], config, r1);
  auto b = critic_sampling(f.actor, f.test_critic, &f.repair_model, f.vocab,
                           f.dataset.problems[2], config, r2);
  REQUIRE(a.programs.size() == b.programs.size());
  for (std::size_t i = 0; i < a.programs.size(); ++i) {
    CHECK(a.programs[i].tokens == b.programs[i].tokens);
  }
}
