#include "synthrl/inference/critic_sampling.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

#include "synthrl/corpus/encode.hpp"
#include "synthrl/models/critic_signals.hpp"
#include "synthrl/models/repair_input.hpp"

namespace synthrl::inference {

using corpus::Vocabulary;
using models::Seq2Seq;

namespace {

constexpr int kPassIndex = 1;  // binary head: 0 FailedTest, 1 PassedTest

void emit(const TraceSink* trace, nlohmann::json record) {
  if (trace != nullptr && *trace) (*trace)(std::move(record));
}

// Descending by score, then mean log-likelihood, then input order.
std::vector<std::size_t> ranked_order(std::span<const ProgramCandidate> candidates) {
  std::vector<std::size_t> order(candidates.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
    if (candidates[i].critic_score != candidates[j].critic_score) {
      return candidates[i].critic_score > candidates[j].critic_score;
    }
    if (candidates[i].mean_logp != candidates[j].mean_logp) {
      return candidates[i].mean_logp > candidates[j].mean_logp;
    }
    return i < j;
  });
  return order;
}

}  // namespace

ProgramCandidate make_candidate(const Seq2Seq& actor, const Seq2Seq& test_critic,
                                const Vocabulary& vocab, const corpus::ProblemSpec& problem,
                                std::vector<int> tokens) {
  ProgramCandidate candidate;
  candidate.example_report = corpus::evaluate_ids(vocab, tokens, problem.example_tests);

  const auto source = corpus::encode_source(vocab, problem.description);
  diffkit::Tape::NoGrad guard;
  auto tf = actor.log_prob(source, tokens);
  candidate.mean_logp = tf.total_logp / static_cast<double>(tf.token_logp.size());
  if (!tokens.empty()) {
    auto critic_out = test_critic.critic_forward(source, tokens);
    candidate.critic_score = models::sequence_outcome_probs(critic_out)[kPassIndex];
  }
  candidate.tokens = std::move(tokens);
  return candidate;
}

GenerationBatch generate_batch(const Seq2Seq& actor, const Seq2Seq& test_critic,
                               const Vocabulary& vocab, const corpus::ProblemSpec& problem,
                               const CsConfig& config, Rng& rng) {
  if (config.n < 1) throw std::invalid_argument("batch size must be at least 1");
  GenerationBatch batch;
  batch.problem_id = problem.id;
  const auto source = corpus::encode_source(vocab, problem.description);
  for (int i = 0; i < config.n; ++i) {
    auto sampled = actor.sample(source, config.temperature, config.top_p, config.max_len, rng);
    batch.programs.push_back(
        make_candidate(actor, test_critic, vocab, problem, std::move(sampled.tokens)));
  }
  return batch;
}

std::size_t select_seed_prefix(std::span<const double> pass_values) {
  if (pass_values.empty()) return 0;
  std::size_t t_max = 0;
  for (std::size_t t = 1; t < pass_values.size(); ++t) {
    if (pass_values[t] > pass_values[t_max]) t_max = t;
  }
  std::size_t keep = t_max + 1;
  for (std::size_t j = 0; j < keep; ++j) {
    if (pass_values[j] < 0.5) {  // fail probability dominates
      keep = j;
      break;
    }
  }
  if (keep == pass_values.size()) --keep;  // seeds are strict prefixes
  return keep;
}

std::vector<int> select_seed(const Seq2Seq& test_critic, std::span<const int> source,
                             std::span<const int> program) {
  const auto values = test_critic.prefix_pass_values(source, program);
  const std::size_t keep = select_seed_prefix(values);
  return std::vector<int>(program.begin(), program.begin() + static_cast<std::ptrdiff_t>(keep));
}

std::vector<int> upsample_counts(int n, std::span<const double> scores,
                                 std::span<const double> tiebreak) {
  if (scores.empty()) throw std::invalid_argument("upsample_counts: no seeds");
  if (tiebreak.size() != scores.size()) throw std::invalid_argument("tiebreak size mismatch");
  const int k = static_cast<int>(scores.size());
  std::vector<int> counts(scores.size(), n / k);
  int remainder = n % k;
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
    if (scores[i] != scores[j]) return scores[i] > scores[j];
    if (tiebreak[i] != tiebreak[j]) return tiebreak[i] > tiebreak[j];
    return i < j;
  });
  for (int r = 0; r < remainder; ++r) ++counts[order[static_cast<std::size_t>(r)]];
  return counts;
}

std::vector<ProgramCandidate> refine(const Seq2Seq& actor, const Seq2Seq& test_critic,
                                     const Vocabulary& vocab,
                                     const corpus::ProblemSpec& problem,
                                     std::span<const ProgramCandidate> passing,
                                     const CsConfig& config, Rng& rng,
                                     const TraceSink* trace) {
  if (passing.empty()) throw std::invalid_argument("refine needs a non-empty passing set");
  const auto source = corpus::encode_source(vocab, problem.description);

  std::vector<std::vector<int>> seeds;
  std::vector<double> scores, tiebreak;
  for (const ProgramCandidate& candidate : passing) {
    seeds.push_back(select_seed(test_critic, source, candidate.tokens));
    scores.push_back(candidate.critic_score);
    tiebreak.push_back(candidate.mean_logp);
  }
  const auto counts = upsample_counts(config.n, scores, tiebreak);

  if (trace != nullptr) {
    nlohmann::json seed_records = nlohmann::json::array();
    for (std::size_t i = 0; i < seeds.size(); ++i) {
      seed_records.push_back({{"origin_len", passing[i].tokens.size()},
                              {"prefix_len", seeds[i].size()},
                              {"copies", counts[i]},
                              {"score", scores[i]}});
    }
    emit(trace, {{"problem", problem.id}, {"stage", "refine"}, {"seeds", seed_records}});
  }

  std::vector<ProgramCandidate> refined;
  refined.reserve(static_cast<std::size_t>(config.n));
  for (std::size_t i = 0; i < seeds.size(); ++i) {
    for (int copy = 0; copy < counts[i]; ++copy) {
      auto sampled = actor.sample_with_prefix(source, seeds[i], config.temperature,
                                              config.top_p, config.max_len, rng);
      refined.push_back(
          make_candidate(actor, test_critic, vocab, problem, std::move(sampled.tokens)));
    }
  }
  return refined;
}

std::vector<ProgramCandidate> repair(const Seq2Seq& actor, const Seq2Seq& repair_model,
                                     const Seq2Seq& test_critic, const Vocabulary& vocab,
                                     const corpus::ProblemSpec& problem,
                                     std::span<const ProgramCandidate> failed,
                                     const CsConfig& config, Rng& rng,
                                     const TraceSink* trace) {
  if (config.m < 1) throw std::invalid_argument("repair needs m >= 1");
  if (config.m > static_cast<int>(failed.size())) {
    throw std::invalid_argument("repair: m exceeds the failed set");
  }
  const auto order = ranked_order(failed);
  const auto description = vocab.ids_of(problem.description);

  // floor(N/M) repairs per candidate, remainder to the top-ranked one.
  std::vector<int> counts(static_cast<std::size_t>(config.m), config.n / config.m);
  counts[0] += config.n % config.m;

  if (trace != nullptr) {
    nlohmann::json chosen = nlohmann::json::array();
    for (int i = 0; i < config.m; ++i) {
      const ProgramCandidate& candidate = failed[order[static_cast<std::size_t>(i)]];
      chosen.push_back({{"score", candidate.critic_score},
                        {"outcome", minilang::outcome_name(candidate.example_report.category)},
                        {"subtype", minilang::subtype_name(candidate.example_report.subtype)},
                        {"copies", counts[static_cast<std::size_t>(i)]}});
    }
    emit(trace, {{"problem", problem.id}, {"stage", "repair"}, {"candidates", chosen}});
  }

  std::vector<ProgramCandidate> repaired;
  repaired.reserve(static_cast<std::size_t>(config.n));
  for (int i = 0; i < config.m; ++i) {
    const ProgramCandidate& candidate = failed[order[static_cast<std::size_t>(i)]];
    const auto input =
        models::repair_input(vocab, description, candidate.tokens,
                             candidate.example_report.category,
                             candidate.example_report.subtype);
    for (int copy = 0; copy < counts[static_cast<std::size_t>(i)]; ++copy) {
      auto sampled =
          repair_model.sample(input, config.temperature, config.top_p, config.max_len, rng);
      repaired.push_back(
          make_candidate(actor, test_critic, vocab, problem, std::move(sampled.tokens)));
    }
  }
  return repaired;
}

GenerationBatch critic_sampling(const Seq2Seq& actor, const Seq2Seq& test_critic,
                                const Seq2Seq* repair_model, const Vocabulary& vocab,
                                const corpus::ProblemSpec& problem, const CsConfig& config,
                                Rng& rng, const TraceSink* trace) {
  if (config.mode == CsMode::RefineRepair && repair_model == nullptr) {
    throw std::invalid_argument("refine_repair mode needs a repair model");
  }
  GenerationBatch batch = generate_batch(actor, test_critic, vocab, problem, config, rng);

  std::vector<ProgramCandidate> passing, failing;
  for (ProgramCandidate& candidate : batch.programs) {
    (candidate.passes_examples() ? passing : failing).push_back(candidate);
  }
  emit(trace, {{"problem", problem.id},
               {"stage", "partition"},
               {"passing", passing.size()},
               {"failing", failing.size()}});

  if (config.mode == CsMode::Off) return batch;

  if (!passing.empty()) {
    batch.programs = refine(actor, test_critic, vocab, problem, passing, config, rng, trace);
    return batch;
  }
  if (config.mode == CsMode::Refine) return batch;  // nothing to seed from

  // Complete failure: repair, re-partition, then refine when possible.
  auto repaired =
      repair(actor, *repair_model, test_critic, vocab, problem, failing, config, rng, trace);
  std::vector<ProgramCandidate> second_pass;
  for (const ProgramCandidate& candidate : repaired) {
    if (candidate.passes_examples()) second_pass.push_back(candidate);
  }
  emit(trace, {{"problem", problem.id},
               {"stage", "repartition"},
               {"passing", second_pass.size()}});
  if (!second_pass.empty()) {
    batch.programs =
        refine(actor, test_critic, vocab, problem, second_pass, config, rng, trace);
    return batch;
  }
  batch.programs = std::move(repaired);
  return batch;
}

}  // namespace synthrl::inference
