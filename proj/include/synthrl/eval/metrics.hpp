#pragma once

#include <array>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "synthrl/minilang/outcome.hpp"

namespace synthrl::eval {

// One generated program's evaluation footprint. Hidden and example
// outcomes come from disjoint test sets of the problem.
struct ProgramRecord {
  minilang::Outcome hidden_category = minilang::Outcome::CompileError;
  minilang::ErrorSubtype hidden_subtype = minilang::ErrorSubtype::Syntax;
  minilang::Outcome example_category = minilang::Outcome::CompileError;
  minilang::ErrorSubtype example_subtype = minilang::ErrorSubtype::Syntax;
  double mean_logp = 0.0;
  double critic_score = 0.0;

  bool passes_hidden() const { return hidden_category == minilang::Outcome::PassedTest; }
  bool passes_examples() const { return example_category == minilang::Outcome::PassedTest; }
};

struct EvalRecord {
  std::string problem_id;
  int tier = 1;
  std::vector<ProgramRecord> programs;
};

enum class PassMode { Raw, Unbiased };

// Raw: fraction of problems with at least one hidden-passing program among
// exactly k programs. Unbiased: mean of 1 - C(N-c, k)/C(N, k) over
// problems, computed with overflow-safe running products.
double pass_at_k(std::span<const EvalRecord> records, int k, PassMode mode);

// Keeps the first k programs of every problem (for raw pass@k at k < N).
std::vector<EvalRecord> truncate_records(std::span<const EvalRecord> records, int k);

// Example-test filtering with ranked selection: the example-passing set
// ordered by mean log-likelihood (ties by critic score) fills up to n
// slots; any remainder comes from the failing set ordered by critic score.
// A problem counts as solved when a selected program passes hidden tests.
double n_at_k(std::span<const EvalRecord> records, int n, int k);

enum class TestSet { Example, Hidden };

struct OutcomeHistogram {
  std::array<double, minilang::kOutcomeCount> category_pct{};
  // Error subtypes only (syntax .. wrong_answer); PassedTest carries none.
  std::array<double, 6> subtype_pct{};
  int problems = 0;
};

// Mean over problems of per-problem percentage breakdowns.
OutcomeHistogram outcome_histogram(std::span<const EvalRecord> records, TestSet set);
std::map<int, OutcomeHistogram> outcome_histogram_by_tier(std::span<const EvalRecord> records,
                                                          TestSet set);

struct MetricRow {
  std::string metric;
  int k = 0;
  int n = 0;
  std::string tier = "all";  // "all" or "1"/"2"/"3"
  double value = 0.0;
};

// The standard metric table: raw and unbiased pass@k for each k, n@k for
// each n, and outcome histogram percentages, overall and per tier.
std::vector<MetricRow> standard_rows(std::span<const EvalRecord> records,
                                     std::span<const int> ks, std::span<const int> ns);

// metric,k,n,tier,value with a fixed numeric format.
std::string render_csv(std::span<const MetricRow> rows);
std::string render_summary(std::span<const MetricRow> rows);

}  // namespace synthrl::eval
