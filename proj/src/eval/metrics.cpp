#include "synthrl/eval/metrics.hpp"

#include <algorithm>
#include <cstdio>
#include <numeric>
#include <stdexcept>

namespace synthrl::eval {

namespace {

int passing_count(const EvalRecord& record) {
  int c = 0;
  for (const ProgramRecord& p : record.programs) c += p.passes_hidden() ? 1 : 0;
  return c;
}

}  // namespace

double pass_at_k(std::span<const EvalRecord> records, int k, PassMode mode) {
  if (records.empty()) return 0.0;
  if (k < 1) throw std::invalid_argument("pass_at_k: k must be positive");
  double solved = 0.0;
  for (const EvalRecord& record : records) {
    const int n = static_cast<int>(record.programs.size());
    if (mode == PassMode::Raw) {
      if (n != k) throw std::invalid_argument("raw pass@k needs exactly k programs");
      solved += passing_count(record) > 0 ? 1.0 : 0.0;
    } else {
      if (n < k) throw std::invalid_argument("unbiased pass@k needs at least k programs");
      const int c = passing_count(record);
      double miss = 1.0;  // C(n-c, k) / C(n, k) as a running product
      for (int i = 0; i < k; ++i) {
        const double numer = static_cast<double>(n - c - i);
        if (numer <= 0.0) {
          miss = 0.0;
          break;
        }
        miss *= numer / static_cast<double>(n - i);
      }
      solved += 1.0 - miss;
    }
  }
  return solved / static_cast<double>(records.size());
}

std::vector<EvalRecord> truncate_records(std::span<const EvalRecord> records, int k) {
  std::vector<EvalRecord> out;
  out.reserve(records.size());
  for (const EvalRecord& record : records) {
    if (static_cast<int>(record.programs.size()) < k) {
      throw std::invalid_argument("truncate_records: fewer than k programs");
    }
    EvalRecord copy;
    copy.problem_id = record.problem_id;
    copy.tier = record.tier;
    copy.programs.assign(record.programs.begin(), record.programs.begin() + k);
    out.push_back(std::move(copy));
  }
  return out;
}

double n_at_k(std::span<const EvalRecord> records, int n, int k) {
  if (records.empty()) return 0.0;
  if (n < 1 || n > k) throw std::invalid_argument("n_at_k needs 1 <= n <= k");
  double solved = 0.0;
  for (const EvalRecord& record : records) {
    if (static_cast<int>(record.programs.size()) != k) {
      throw std::invalid_argument("n_at_k needs exactly k programs per problem");
    }
    std::vector<std::size_t> passing, failing;
    for (std::size_t i = 0; i < record.programs.size(); ++i) {
      (record.programs[i].passes_examples() ? passing : failing).push_back(i);
    }
    const auto& programs = record.programs;
    std::sort(passing.begin(), passing.end(), [&](std::size_t a, std::size_t b) {
      if (programs[a].mean_logp != programs[b].mean_logp) {
        return programs[a].mean_logp > programs[b].mean_logp;
      }
      if (programs[a].critic_score != programs[b].critic_score) {
        return programs[a].critic_score > programs[b].critic_score;
      }
      return a < b;
    });
    std::sort(failing.begin(), failing.end(), [&](std::size_t a, std::size_t b) {
      if (programs[a].critic_score != programs[b].critic_score) {
        return programs[a].critic_score > programs[b].critic_score;
      }
      if (programs[a].mean_logp != programs[b].mean_logp) {
        return programs[a].mean_logp > programs[b].mean_logp;
      }
      return a < b;
    });

    std::vector<std::size_t> selected;
    for (std::size_t i = 0; i < passing.size() && static_cast<int>(selected.size()) < n; ++i) {
      selected.push_back(passing[i]);
    }
    for (std::size_t i = 0; i < failing.size() && static_cast<int>(selected.size()) < n; ++i) {
      selected.push_back(failing[i]);
    }
    bool hit = false;
    for (std::size_t index : selected) hit = hit || programs[index].passes_hidden();
    solved += hit ? 1.0 : 0.0;
  }
  return solved / static_cast<double>(records.size());
}

OutcomeHistogram outcome_histogram(std::span<const EvalRecord> records, TestSet set) {
  OutcomeHistogram histogram;
  for (const EvalRecord& record : records) {
    if (record.programs.empty()) continue;
    std::array<double, minilang::kOutcomeCount> cat{};
    std::array<double, 6> sub{};
    for (const ProgramRecord& p : record.programs) {
      const auto category = set == TestSet::Hidden ? p.hidden_category : p.example_category;
      const auto subtype = set == TestSet::Hidden ? p.hidden_subtype : p.example_subtype;
      cat[static_cast<std::size_t>(category)] += 1.0;
      if (subtype != minilang::ErrorSubtype::None) {
        sub[static_cast<std::size_t>(subtype)] += 1.0;
      }
    }
    const double n = static_cast<double>(record.programs.size());
    for (std::size_t i = 0; i < cat.size(); ++i) histogram.category_pct[i] += 100.0 * cat[i] / n;
    for (std::size_t i = 0; i < sub.size(); ++i) histogram.subtype_pct[i] += 100.0 * sub[i] / n;
    ++histogram.problems;
  }
  if (histogram.problems > 0) {
    for (double& v : histogram.category_pct) v /= histogram.problems;
    for (double& v : histogram.subtype_pct) v /= histogram.problems;
  }
  return histogram;
}

std::map<int, OutcomeHistogram> outcome_histogram_by_tier(std::span<const EvalRecord> records,
                                                          TestSet set) {
  std::map<int, std::vector<EvalRecord>> by_tier;
  for (const EvalRecord& record : records) by_tier[record.tier].push_back(record);
  std::map<int, OutcomeHistogram> out;
  for (const auto& [tier, group] : by_tier) out[tier] = outcome_histogram(group, set);
  return out;
}

std::vector<MetricRow> standard_rows(std::span<const EvalRecord> records,
                                     std::span<const int> ks, std::span<const int> ns) {
  std::vector<MetricRow> rows;
  if (records.empty()) return rows;
  const int total = static_cast<int>(records.front().programs.size());

  std::map<std::string, std::vector<EvalRecord>> groups;
  groups["all"] = std::vector<EvalRecord>(records.begin(), records.end());
  for (const EvalRecord& record : records) {
    groups[std::to_string(record.tier)].push_back(record);
  }

  for (const auto& [tier, group] : groups) {
    for (int k : ks) {
      if (k > total) continue;
      rows.push_back({"pass@k_raw", k, 0, tier,
                      pass_at_k(truncate_records(group, k), k, PassMode::Raw)});
      rows.push_back({"pass@k_unbiased", k, 0, tier, pass_at_k(group, k, PassMode::Unbiased)});
    }
    for (int n : ns) {
      if (n > total) continue;
      rows.push_back({"n@k", total, n, tier, n_at_k(group, n, total)});
    }
    for (TestSet set : {TestSet::Example, TestSet::Hidden}) {
      const char* prefix = set == TestSet::Example ? "example" : "hidden";
      const OutcomeHistogram histogram = outcome_histogram(group, set);
      for (int c = 0; c < minilang::kOutcomeCount; ++c) {
        rows.push_back({std::string(prefix) + "_pct_" +
                            std::string(minilang::outcome_name(static_cast<minilang::Outcome>(c))),
                        total, 0, tier, histogram.category_pct[static_cast<std::size_t>(c)]});
      }
      for (int s = 0; s < 6; ++s) {
        rows.push_back(
            {std::string(prefix) + "_pct_" +
                 std::string(minilang::subtype_name(static_cast<minilang::ErrorSubtype>(s))),
             total, 0, tier, histogram.subtype_pct[static_cast<std::size_t>(s)]});
      }
    }
  }
  return rows;
}

std::string render_csv(std::span<const MetricRow> rows) {
  std::string out = "metric,k,n,tier,value\n";
  char line[160];
  for (const MetricRow& row : rows) {
    std::snprintf(line, sizeof(line), "%s,%d,%d,%s,%.6f\n", row.metric.c_str(), row.k, row.n,
                  row.tier.c_str(), row.value);
    out += line;
  }
  return out;
}

std::string render_summary(std::span<const MetricRow> rows) {
  std::string out;
  char line[160];
  for (const MetricRow& row : rows) {
    if (row.tier != "all") continue;
    std::snprintf(line, sizeof(line), "%-28s k=%-3d n=%-3d %8.4f\n", row.metric.c_str(), row.k,
                  row.n, row.value);
    out += line;
  }
  return out;
}

}  // namespace synthrl::eval
