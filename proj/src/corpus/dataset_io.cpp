#include "synthrl/corpus/dataset_io.hpp"

#include <fstream>
#include <set>

#include "json.hpp"
#include "synthrl/minilang/outcome.hpp"

namespace synthrl::corpus {

namespace {

using nlohmann::json;
using minilang::TestCase;

json test_to_json(const TestCase& test) {
  return json{{"a", test.a}, {"b", test.b}, {"c", test.c}, {"expected", test.expected}};
}

TestCase test_from_json(const json& j) {
  TestCase test;
  test.a = j.at("a").get<std::int64_t>();
  test.b = j.at("b").get<std::int64_t>();
  test.c = j.at("c").get<std::int64_t>();
  test.expected = j.at("expected").get<std::int64_t>();
  return test;
}

[[noreturn]] void fail(std::size_t line_no, const std::string& what) {
  throw DatasetError("dataset line " + std::to_string(line_no) + ": " + what);
}

}  // namespace

void save_dataset(const Dataset& dataset, const std::string& path) {
  std::ofstream out(path, std::ios::binary);  // binary keeps LF endings everywhere
  if (!out) throw DatasetError("cannot open for writing: " + path);

  out << json{{"generator_seed", dataset.generator_seed}, {"split", dataset.split}}.dump()
      << '\n';
  for (const ProblemSpec& problem : dataset.problems) {
    json j;
    j["id"] = problem.id;
    j["tier"] = problem.tier;
    j["description"] = problem.description;
    j["example_tests"] = json::array();
    for (const TestCase& t : problem.example_tests) j["example_tests"].push_back(test_to_json(t));
    j["hidden_tests"] = json::array();
    for (const TestCase& t : problem.hidden_tests) j["hidden_tests"].push_back(test_to_json(t));
    json gt = json::array();
    for (const minilang::Token& token : problem.ground_truth) gt.push_back(token.text);
    j["ground_truth"] = gt;
    out << j.dump() << '\n';
  }
  if (!out) throw DatasetError("write failed: " + path);
}

Dataset load_dataset(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DatasetError("cannot open for reading: " + path);

  Dataset dataset;
  std::set<std::string> seen_ids;
  std::string line;
  std::size_t line_no = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& e) {
      fail(line_no, e.what());
    }
    if (!header_seen) {
      header_seen = true;
      if (!j.contains("generator_seed")) fail(line_no, "missing generator_seed header");
      dataset.generator_seed = j.at("generator_seed").get<std::uint64_t>();
      dataset.split = j.value("split", "train");
      continue;
    }
    ProblemSpec problem;
    try {
      problem.id = j.at("id").get<std::string>();
      problem.tier = j.at("tier").get<int>();
      problem.description = j.at("description").get<std::vector<std::string>>();
      for (const json& t : j.at("example_tests")) problem.example_tests.push_back(test_from_json(t));
      for (const json& t : j.at("hidden_tests")) problem.hidden_tests.push_back(test_from_json(t));
      for (const json& t : j.at("ground_truth")) {
        auto token = minilang::classify(t.get<std::string>());
        if (!token) fail(line_no, "ground truth token is not part of the language");
        problem.ground_truth.push_back(std::move(*token));
      }
    } catch (const json::exception& e) {
      fail(line_no, e.what());
    }
    if (!seen_ids.insert(problem.id).second) fail(line_no, "duplicate problem id " + problem.id);
    if (problem.hidden_tests.empty()) fail(line_no, "problem has no hidden tests");

    auto report = minilang::evaluate_program(problem.ground_truth, problem.all_tests());
    if (report.category != minilang::Outcome::PassedTest) {
      fail(line_no, "ground truth does not pass its own tests");
    }
    dataset.problems.push_back(std::move(problem));
  }
  return dataset;
}

}  // namespace synthrl::corpus
