#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <tuple>

#include "synthrl/corpus/dataset_io.hpp"
#include "synthrl/corpus/encode.hpp"
#include "synthrl/corpus/generate.hpp"
#include "synthrl/corpus/vocabulary.hpp"
#include "synthrl/minilang/outcome.hpp"

using namespace synthrl;
using namespace synthrl::corpus;

namespace {

std::string temp_path(const char* name) {
  return (std::filesystem::temp_directory_path() / name).string();
}

bool problems_equal(const ProblemSpec& a, const ProblemSpec& b) {
  auto tests_equal = [](const std::vector<minilang::TestCase>& x,
                        const std::vector<minilang::TestCase>& y) {
    if (x.size() != y.size()) return false;
    for (std::size_t i = 0; i < x.size(); ++i) {
      if (x[i].a != y[i].a || x[i].b != y[i].b || x[i].c != y[i].c ||
          x[i].expected != y[i].expected) {
        return false;
      }
    }
    return true;
  };
  return a.id == b.id && a.tier == b.tier && a.description == b.description &&
         tests_equal(a.example_tests, b.example_tests) &&
         tests_equal(a.hidden_tests, b.hidden_tests) && a.ground_truth == b.ground_truth;
}

}  // namespace

TEST_CASE("vocabulary is a dense stable bijection with PAD at zero") {
  Vocabulary vocab;
  CHECK(vocab.pad() == 0);
  CHECK(vocab.token_of(0) == "<pad>");
  for (int id = 0; id < vocab.size(); ++id) {
    auto round = vocab.id_of(vocab.token_of(id));
    REQUIRE(round.has_value());
    CHECK(*round == id);
  }
  Vocabulary again;
  CHECK(again.size() == vocab.size());
  for (int id = 0; id < vocab.size(); ++id) CHECK(again.token_of(id) == vocab.token_of(id));

  // Every surface form of the language and every template word is covered.
  for (const char* t : {"a", "z", "9", "==", ";", "loop", "given", ",", "otherwise"}) {
    CHECK(vocab.id_of(t).has_value());
  }
  CHECK(vocab.outcome_token(minilang::Outcome::PassedTest) > 0);
  CHECK(vocab.subtype_token(minilang::ErrorSubtype::DivByZero) > 0);
}

TEST_CASE("generated problems satisfy their invariants") {
  for (int tier = 1; tier <= 3; ++tier) {
    Rng rng(100 + tier);
    for (int i = 0; i < 25; ++i) {
      ProblemSpec problem = generate_problem(tier, rng);
      CHECK(problem.tier == tier);
      CHECK(problem.example_tests.size() == 2);
      CHECK(problem.hidden_tests.size() >= 5);
      CHECK(problem.hidden_tests.size() <= 10);

      auto report = minilang::evaluate_program(problem.ground_truth, problem.all_tests());
      REQUIRE(report.category == minilang::Outcome::PassedTest);

      // Distinct input triples.
      std::set<std::tuple<std::int64_t, std::int64_t, std::int64_t>> seen;
      for (const auto& t : problem.all_tests()) {
        CHECK(seen.insert({t.a, t.b, t.c}).second);
      }

      // "return 0" must not pass the hidden tests.
      bool all_zero = true;
      for (const auto& t : problem.hidden_tests) all_zero = all_zero && t.expected == 0;
      CHECK_FALSE(all_zero);
    }
  }
}

TEST_CASE("problem generation is deterministic given the seed") {
  Rng r1(42), r2(42);
  ProblemSpec a = generate_problem(1, r1);
  ProblemSpec b = generate_problem(1, r2);
  a.id = b.id = "p";
  CHECK(problems_equal(a, b));
}

TEST_CASE("tier 3 ground truth loops exactly once over c") {
  Rng rng(7);
  ProblemSpec problem = generate_problem(3, rng);
  int loops = 0;
  for (std::size_t i = 0; i < problem.ground_truth.size(); ++i) {
    if (problem.ground_truth[i].text == "loop") {
      ++loops;
      REQUIRE(i + 1 < problem.ground_truth.size());
      CHECK(problem.ground_truth[i + 1].text == "c");
      CHECK(problem.ground_truth[i + 2].text == "{");
    }
  }
  CHECK(loops == 1);
}

TEST_CASE("encode adds specials and enforces length limits") {
  Vocabulary vocab;
  ProblemSpec problem;
  problem.description = {"given", "inputs", "a", ",", "b"};
  problem.ground_truth = std::get<std::vector<minilang::Token>>(minilang::lex("return a + b"));

  EncodedPair pair = encode(vocab, problem);
  CHECK(pair.source.size() == 7);  // BOS + 5 + EOS
  CHECK(pair.source.front() == vocab.bos());
  CHECK(pair.source.back() == vocab.eos());
  CHECK(pair.target.size() == 6);  // BOS + 4 + EOS

  // Round trip through surface forms.
  auto back = vocab.tokens_of(std::span<const int>(pair.source).subspan(1, 5));
  CHECK(back == problem.description);

  ProblemSpec oversized = problem;
  oversized.description.assign(70, "given");
  CHECK_THROWS_AS(encode(vocab, oversized), std::length_error);

  ProblemSpec unknown = problem;
  unknown.description = {"notaword"};
  CHECK_THROWS_AS(encode(vocab, unknown), std::invalid_argument);
}

TEST_CASE("dataset save/load round-trips exactly") {
  DatasetConfig config;
  config.problems = 9;
  config.seed = 99;
  Dataset dataset = generate_dataset(config);
  REQUIRE(dataset.problems.size() == 9);

  const std::string path = temp_path("synthrl_ds_roundtrip.jsonl");
  save_dataset(dataset, path);
  Dataset loaded = load_dataset(path);
  CHECK(loaded.generator_seed == dataset.generator_seed);
  CHECK(loaded.split == dataset.split);
  REQUIRE(loaded.problems.size() == dataset.problems.size());
  for (std::size_t i = 0; i < loaded.problems.size(); ++i) {
    CHECK(problems_equal(loaded.problems[i], dataset.problems[i]));
  }
  std::remove(path.c_str());
}

TEST_CASE("dataset load rejects corrupt files") {
  const std::string path = temp_path("synthrl_ds_bad.jsonl");
  {
    std::ofstream out(path, std::ios::binary);
    out << R"({"generator_seed": 1, "split": "train"})" << "\n";
    out << R"({"id": "p0", "tier": 1, "description": ["compute"], )"
        << R"("example_tests": [{"a":0,"b":0,"c":0,"expected":5}], )"
        << R"("hidden_tests": [{"a":1,"b":0,"c":0,"expected":5}], )"
        << R"("ground_truth": ["return", "0"]})" << "\n";
  }
  CHECK_THROWS_AS(load_dataset(path), DatasetError);  // ground truth fails its tests

  {
    std::ofstream out(path, std::ios::binary);
    out << R"({"generator_seed": 1})" << "\n";
    out << "{not json\n";
  }
  CHECK_THROWS_AS(load_dataset(path), DatasetError);

  {
    std::ofstream out(path, std::ios::binary);
  }
  Dataset empty = load_dataset(path);  // empty file is a valid empty dataset
  CHECK(empty.problems.empty());
  std::remove(path.c_str());
}

TEST_CASE("dataset generation is byte-identical across runs") {
  DatasetConfig config;
  config.problems = 20;
  config.seed = 555;
  const std::string p1 = temp_path("synthrl_ds_a.jsonl");
  const std::string p2 = temp_path("synthrl_ds_b.jsonl");
  save_dataset(generate_dataset(config), p1);
  save_dataset(generate_dataset(config), p2);
  std::ifstream f1(p1, std::ios::binary), f2(p2, std::ios::binary);
  std::string s1((std::istreambuf_iterator<char>(f1)), std::istreambuf_iterator<char>());
  std::string s2((std::istreambuf_iterator<char>(f2)), std::istreambuf_iterator<char>());
  CHECK(s1 == s2);
  CHECK_FALSE(s1.empty());
  std::remove(p1.c_str());
  std::remove(p2.c_str());
}

TEST_CASE("tier mix follows the configured fractions") {
  DatasetConfig config;
  config.problems = 50;
  config.seed = 3;
  Dataset dataset = generate_dataset(config);
  int counts[4] = {0, 0, 0, 0};
  for (const auto& p : dataset.problems) ++counts[p.tier];
  CHECK(counts[1] == 30);
  CHECK(counts[2] == 15);
  CHECK(counts[3] == 5);
}

TEST_CASE("model-emitted ids evaluate through the vocabulary") {
  Vocabulary vocab;
  std::vector<int> ids = {*vocab.id_of("return"), *vocab.id_of("a"), *vocab.id_of("+"),
                          *vocab.id_of("b")};
  std::vector<minilang::TestCase> tests = {{1, 2, 0, 3}};
  auto report = evaluate_ids(vocab, ids, tests);
  CHECK(report.category == minilang::Outcome::PassedTest);

  // Description words are not program tokens.
  std::vector<int> bad = {*vocab.id_of("return"), *vocab.id_of("given")};
  auto bad_report = evaluate_ids(vocab, bad, tests);
  CHECK(bad_report.category == minilang::Outcome::CompileError);
  CHECK(bad_report.subtype == minilang::ErrorSubtype::Syntax);
}
