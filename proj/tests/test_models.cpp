#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstdio>
#include <filesystem>

#include "support/finite_diff.hpp"
#include "synthrl/corpus/vocabulary.hpp"
#include "synthrl/models/critic_signals.hpp"
#include "synthrl/models/decoding.hpp"
#include "synthrl/models/repair_input.hpp"
#include "synthrl/models/seq2seq.hpp"

using namespace synthrl;
using namespace synthrl::models;

namespace {

// Small dimensions keep finite differences fast; the architecture is the
// same at every size.
ModelConfig tiny_actor_config(int vocab) {
  ModelConfig config = ModelConfig::actor(vocab, /*embed=*/4, /*hidden=*/6);
  config.attn = 4;
  return config;
}

ModelConfig tiny_critic_config(int vocab, int head) {
  ModelConfig config = ModelConfig::critic(vocab, /*embed=*/4, /*hidden=*/6);
  config.attn = 4;
  config.head = head;
  config.role = head == 2 ? "test_critic" : "critic";
  return config;
}

void zero_head(Seq2Seq& model) {
  model.params().get("out.weight").values() = 0.0;
  model.params().get("out.bias").values() = 0.0;
}

const std::vector<int> kSource = {1, 20, 21, 22, 2};  // BOS w w w EOS
const std::vector<int> kTarget = {17, 18, 19};

}  // namespace

TEST_CASE("zero output projection gives uniform per-token log-probs") {
  Seq2Seq actor(tiny_actor_config(24), 7);
  zero_head(actor);
  auto tf = actor.log_prob(kSource, kTarget);
  REQUIRE(tf.token_logp.size() == kTarget.size() + 1);  // + EOS
  for (double lp : tf.token_logp) {
    CHECK(lp == doctest::Approx(-std::log(24.0)).epsilon(1e-12));
  }
}

TEST_CASE("per-token log-probs sum to the total") {
  Seq2Seq actor(tiny_actor_config(24), 3);
  auto tf = actor.log_prob(kSource, kTarget);
  double sum = 0.0;
  for (double lp : tf.token_logp) sum += lp;
  CHECK(std::abs(sum - tf.total_logp) <= 1e-9);
  CHECK(tf.total_nll.value() == doctest::Approx(-tf.total_logp).epsilon(1e-9));
}

TEST_CASE("overfitting one pair raises its likelihood and greedy reproduces it") {
  Seq2Seq actor(tiny_actor_config(24), 11);
  std::vector<double> checkpoints;
  for (int step = 0; step < 600; ++step) {
    diffkit::Tape tape;
    auto tf = actor.log_prob(kSource, kTarget);
    tape.backward(tf.total_nll);
    diffkit::adam_step(actor.params(), 3e-3);
    if ((step + 1) % 150 == 0) {
      checkpoints.push_back(actor.log_prob(kSource, kTarget).total_logp);
    }
  }
  for (std::size_t i = 1; i < checkpoints.size(); ++i) {
    CHECK(checkpoints[i] > checkpoints[i - 1]);  // monotone over the window
  }
  CHECK(actor.greedy(kSource, 16) == kTarget);
}

TEST_CASE("sampling is deterministic under a fixed rng") {
  Seq2Seq actor(tiny_actor_config(24), 5);
  Rng r1(99), r2(99);
  auto a = actor.sample(kSource, 1.0, 0.95, 16, r1);
  auto b = actor.sample(kSource, 1.0, 0.95, 16, r2);
  CHECK(a.tokens == b.tokens);
  CHECK(a.token_logp == b.token_logp);
}

TEST_CASE("temperature to zero with full nucleus matches greedy") {
  Seq2Seq actor(tiny_actor_config(24), 5);
  Rng rng(1);
  auto sampled = actor.sample(kSource, 1e-7, 1.0, 16, rng);
  CHECK(sampled.tokens == actor.greedy(kSource, 16));
}

TEST_CASE("nucleus sampling renormalizes the 0.9-mass prefix of 0.6/0.3/0.1") {
  diffkit::Array logits(3);
  logits << std::log(0.6), std::log(0.3), std::log(0.1);
  Rng rng(4242);
  int counts[3] = {0, 0, 0};
  const int draws = 10000;
  for (int i = 0; i < draws; ++i) {
    ++counts[nucleus_sample(logits, 1.0, 0.9, rng).token];
  }
  CHECK(std::abs(counts[0] / double(draws) - 2.0 / 3.0) <= 0.02);
  CHECK(std::abs(counts[1] / double(draws) - 1.0 / 3.0) <= 0.02);
  CHECK(counts[2] == 0);

  // Recorded log-prob comes from the untruncated distribution.
  auto drawn = nucleus_sample(logits, 1.0, 0.9, rng);
  const double expected = drawn.token == 0 ? std::log(0.6) : std::log(0.3);
  CHECK(drawn.log_prob == doctest::Approx(expected).epsilon(1e-9));
}

TEST_CASE("full-nucleus unit-temperature sampling follows softmax (chi-square)") {
  Seq2Seq actor(tiny_actor_config(3), 17);
  const std::vector<int> source = {1, 0, 2};
  // First-step distribution from a teacher-forced probe.
  double probs[3];
  for (int v = 0; v < 3; ++v) {
    const std::vector<int> target = {v};
    probs[v] = std::exp(actor.log_prob(source, target).token_logp[0]);
  }
  Rng rng(31);
  int counts[3] = {0, 0, 0};
  const int draws = 10000;
  for (int i = 0; i < draws; ++i) {
    Rng fresh(rng.next_u64());
    auto sampled = actor.sample(source, 1.0, 1.0, 1, fresh);
    ++counts[sampled.tokens.empty() ? 2 : sampled.tokens[0]];  // EOS id is 2
  }
  double chi2 = 0.0;
  for (int v = 0; v < 3; ++v) {
    const double expected = probs[v] * draws;
    chi2 += (counts[v] - expected) * (counts[v] - expected) / expected;
  }
  CHECK(chi2 < 13.8);  // df=2, alpha=0.001
}

TEST_CASE("argmax decoding is invariant to positive temperature rescaling") {
  Rng rng(8);
  for (int trial = 0; trial < 50; ++trial) {
    diffkit::Array logits(9);
    for (int i = 0; i < 9; ++i) logits[i] = rng.uniform(-4, 4);
    const double temperature = std::exp(rng.uniform(-3, 3));
    CHECK(argmax(logits) == argmax(diffkit::Array(logits / temperature)));
  }
}

TEST_CASE("critic forward yields distributions and a pooled prediction") {
  Seq2Seq critic(tiny_critic_config(24, 4), 23);
  const std::vector<int> program = {17, 18, 19, 20};
  auto out = critic.critic_forward(kSource, program);
  REQUIRE(out.token_logits.size() == program.size());
  for (const auto& logits : out.token_logits) {
    auto p = softmax_values(logits);
    double sum = 0.0;
    for (double v : p) sum += v;
    CHECK(std::abs(sum - 1.0) <= 1e-12);
  }
  CHECK_THROWS_AS(critic.critic_forward(kSource, {}), std::invalid_argument);

  // Single-token program: pooling over one state is the identity.
  auto single = critic.critic_forward(kSource, std::vector<int>{17});
  auto u = softmax_values(single.pooled_logits);
  auto v1 = softmax_values(single.token_logits[0]);
  for (int i = 0; i < 4; ++i) CHECK(u[i] == doctest::Approx(v1[i]).epsilon(1e-12));
}

TEST_CASE("token_values picks the observed outcome column") {
  Seq2Seq::CriticOutput out;
  auto row = [](std::initializer_list<double> probs) {
    std::vector<double> logits;
    for (double p : probs) logits.push_back(std::log(p));
    return diffkit::Tensor::from_values({1, 4}, logits);
  };
  out.token_logits.push_back(row({0.1, 0.2, 0.3, 0.4}));
  out.token_logits.push_back(row({0.25, 0.25, 0.25, 0.25}));

  auto pass = token_values(out, minilang::Outcome::PassedTest);
  CHECK(pass[0] == doctest::Approx(0.4).epsilon(1e-12));
  CHECK(pass[1] == doctest::Approx(0.25).epsilon(1e-12));

  auto compile = token_values(out, minilang::Outcome::CompileError);
  CHECK(compile[0] == doctest::Approx(0.1).epsilon(1e-12));
  CHECK(compile[1] == doctest::Approx(0.25).epsilon(1e-12));

  for (double q : pass) CHECK((q > 0.0 && q < 1.0));
}

TEST_CASE("prefix pass values are causal probabilities") {
  Seq2Seq test_critic(tiny_critic_config(24, 2), 29);
  const std::vector<int> program = {17, 18, 19};
  auto values = test_critic.prefix_pass_values(kSource, program);
  REQUIRE(values.size() == 3);
  for (double p : values) CHECK((p > 0.0 && p < 1.0));

  // Appending tokens never changes the values of the unchanged prefix.
  const std::vector<int> longer = {17, 18, 19, 20, 21};
  auto more = test_critic.prefix_pass_values(kSource, longer);
  for (std::size_t t = 0; t < values.size(); ++t) CHECK(values[t] == more[t]);

  // Binary head: fail probability is the complement.
  auto out = test_critic.critic_forward(kSource, program);
  for (const auto& logits : out.token_logits) {
    auto p = softmax_values(logits);
    CHECK(p[0] + p[1] == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("repair input layout carries the error tags between separators") {
  corpus::Vocabulary vocab;
  const std::vector<int> description = {*vocab.id_of("given"), *vocab.id_of("inputs")};
  const std::vector<int> failing = {*vocab.id_of("return"), *vocab.id_of("a")};
  auto ids = repair_input(vocab, description, failing, minilang::Outcome::RuntimeError,
                          minilang::ErrorSubtype::DivByZero);
  REQUIRE(ids.size() == description.size() + failing.size() + 6);
  CHECK(ids.front() == vocab.bos());
  CHECK(ids.back() == vocab.eos());
  CHECK(ids[1 + description.size()] == vocab.sep());
  CHECK(ids[2 + description.size() + failing.size()] == vocab.sep());
  CHECK(ids[3 + description.size() + failing.size()] ==
        vocab.outcome_token(minilang::Outcome::RuntimeError));
  CHECK(ids[4 + description.size() + failing.size()] ==
        vocab.subtype_token(minilang::ErrorSubtype::DivByZero));

  // Segments between the separators reproduce the inputs exactly.
  std::vector<int> description_segment(ids.begin() + 1, ids.begin() + 1 + description.size());
  CHECK(description_segment == description);
  std::vector<int> program_segment(ids.begin() + 2 + description.size(),
                                   ids.begin() + 2 + description.size() + failing.size());
  CHECK(program_segment == failing);

  std::vector<int> oversized(200, *vocab.id_of("a"));
  CHECK_THROWS_AS(repair_input(vocab, description, oversized, minilang::Outcome::FailedTest,
                               minilang::ErrorSubtype::WrongAnswer),
                  std::length_error);
}

TEST_CASE("models serialize with byte-exact parameter recovery") {
  Seq2Seq actor(tiny_actor_config(24), 41);
  const std::string path =
      (std::filesystem::temp_directory_path() / "synthrl_model_ckpt.bin").string();
  actor.save(path, {{"note", "unit"}});

  auto checkpoint = diffkit::load_checkpoint(path);
  CHECK(checkpoint.metadata.at("role") == "actor");
  CHECK(checkpoint.metadata.at("note") == "unit");
  Seq2Seq restored = Seq2Seq::from_checkpoint(checkpoint);
  REQUIRE(restored.params().size() == actor.params().size());
  for (std::size_t e = 0; e < actor.params().entries().size(); ++e) {
    const auto& a = actor.params().entries()[e].tensor;
    const auto& b = restored.params().entries()[e].tensor;
    for (Eigen::Index i = 0; i < a.size(); ++i) CHECK(a.values()[i] == b.values()[i]);
  }
  CHECK(restored.greedy(kSource, 16) == actor.greedy(kSource, 16));
  std::remove(path.c_str());
}

TEST_CASE("cross-entropy loss gradient matches finite differences") {
  Seq2Seq actor(tiny_actor_config(12), 53);
  const std::vector<int> source = {1, 8, 9, 2};
  const std::vector<int> target = {10, 11, 8};
  auto report = testsupport::finite_diff_check(actor.params(), [&] {
    return actor.log_prob(source, target).total_nll;
  });
  CHECK_MESSAGE(report.max_rel_err <= 1e-6,
                "worst=" << report.worst_param << " err=" << report.max_rel_err);
}

TEST_CASE("critic loss gradient matches finite differences") {
  Seq2Seq critic(tiny_critic_config(12, 4), 59);
  const std::vector<int> source = {1, 8, 9, 2};
  const std::vector<int> program = {10, 11, 8, 9};
  auto report = testsupport::finite_diff_check(critic.params(), [&] {
    auto out = critic.critic_forward(source, program);
    return diffkit::cross_entropy(out.pooled_logits, 2);
  });
  CHECK_MESSAGE(report.max_rel_err <= 1e-6,
                "worst=" << report.worst_param << " err=" << report.max_rel_err);
}
