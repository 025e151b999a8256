#include "synthrl/training/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_map>

#include "synthrl/corpus/encode.hpp"
#include "synthrl/models/critic_signals.hpp"
#include "synthrl/models/repair_input.hpp"
#include "synthrl/training/returns.hpp"

namespace synthrl::training {

using corpus::Vocabulary;
using diffkit::Tape;
using diffkit::Tensor;
using models::Seq2Seq;

namespace {

void shuffle_indices(std::vector<std::size_t>& indices, Rng& rng) {
  for (std::size_t i = indices.size(); i > 1; --i) {
    std::swap(indices[i - 1], indices[rng.uniform_int(0, static_cast<std::int64_t>(i) - 1)]);
  }
}

std::vector<std::size_t> index_range(std::size_t n) {
  std::vector<std::size_t> indices(n);
  for (std::size_t i = 0; i < n; ++i) indices[i] = i;
  return indices;
}

struct PivotSplit {
  std::vector<int> source;
  std::vector<int> target;
};

// Encoder gets tokens before the pivot, decoder predicts the rest.
PivotSplit pivot_split(const Vocabulary& vocab, const std::vector<int>& ids, int pivot) {
  PivotSplit split;
  split.source.push_back(vocab.bos());
  split.source.insert(split.source.end(), ids.begin(), ids.begin() + pivot);
  split.source.push_back(vocab.eos());
  split.target.assign(ids.begin() + pivot, ids.end());
  return split;
}

std::unordered_map<std::string, std::vector<int>> source_index(const Vocabulary& vocab,
                                                               const corpus::Dataset& dataset) {
  std::unordered_map<std::string, std::vector<int>> sources;
  for (const corpus::ProblemSpec& problem : dataset.problems) {
    sources.emplace(problem.id, corpus::encode_source(vocab, problem.description));
  }
  return sources;
}

std::unordered_map<std::string, std::vector<int>> target_index(const Vocabulary& vocab,
                                                               const corpus::Dataset& dataset) {
  std::unordered_map<std::string, std::vector<int>> targets;
  for (const corpus::ProblemSpec& problem : dataset.problems) {
    targets.emplace(problem.id, vocab.ids_of_program(problem.ground_truth));
  }
  return targets;
}

struct CriticExample {
  const std::vector<int>* source;
  const std::vector<int>* program;
  int label;
};

// Shared 90/10 training loop for the outcome critics.
double train_classifier(Seq2Seq& model, const Vocabulary& vocab,
                        std::span<const LabeledSample> samples,
                        const corpus::Dataset& dataset,
                        const std::function<int(const LabeledSample&)>& label_of,
                        const TrainConfig& config, Rng& rng, MetricsLog* log,
                        const std::string& stage) {
  const auto sources = source_index(vocab, dataset);

  std::vector<CriticExample> examples;
  examples.reserve(samples.size());
  for (const LabeledSample& sample : samples) {
    if (sample.program.empty()) continue;  // nothing for the decoder to read
    auto it = sources.find(sample.problem_id);
    if (it == sources.end()) throw std::invalid_argument("sample references unknown problem");
    examples.push_back({&it->second, &sample.program, label_of(sample)});
  }
  if (examples.size() < 10) throw std::invalid_argument("too few critic samples");

  auto order = index_range(examples.size());
  shuffle_indices(order, rng);
  const std::size_t train_n = (examples.size() * 9) / 10;

  for (int epoch = 0; epoch < config.epochs_critic; ++epoch) {
    auto train_order = std::vector<std::size_t>(order.begin(), order.begin() + train_n);
    shuffle_indices(train_order, rng);
    double epoch_loss = 0.0;
    std::size_t seen = 0;
    for (std::size_t start = 0; start < train_order.size(); start += config.batch_size) {
      const std::size_t stop = std::min(train_order.size(), start + config.batch_size);
      Tape tape;
      Tensor batch_loss;
      for (std::size_t i = start; i < stop; ++i) {
        const CriticExample& ex = examples[train_order[i]];
        auto out = model.critic_forward(*ex.source, *ex.program);
        Tensor nll = diffkit::cross_entropy(out.pooled_logits, ex.label);
        batch_loss = batch_loss.defined() ? diffkit::add(batch_loss, nll) : nll;
      }
      batch_loss = diffkit::scale(batch_loss, 1.0 / static_cast<double>(stop - start));
      epoch_loss += batch_loss.value() * static_cast<double>(stop - start);
      seen += stop - start;
      tape.backward(batch_loss);
      diffkit::adam_step(model.params(), config.lr_critic);
    }
    if (log != nullptr) {
      log->append(stage, epoch, {{"loss", epoch_loss / static_cast<double>(seen)}});
    }
  }

  // Held-out accuracy on the remaining 10%.
  Tape::NoGrad guard;
  std::size_t correct = 0, total = 0;
  for (std::size_t i = train_n; i < order.size(); ++i) {
    const CriticExample& ex = examples[order[i]];
    auto out = model.critic_forward(*ex.source, *ex.program);
    const auto probs = models::softmax_values(out.pooled_logits);
    int best = 0;
    for (std::size_t k = 1; k < probs.size(); ++k) {
      if (probs[k] > probs[best]) best = static_cast<int>(k);
    }
    correct += best == ex.label ? 1 : 0;
    ++total;
  }
  const double accuracy =
      total == 0 ? 0.0 : static_cast<double>(correct) / static_cast<double>(total);
  if (log != nullptr) {
    log->append(stage, config.epochs_critic, {{"held_out_accuracy", accuracy}});
  }
  return accuracy;
}

}  // namespace

int ntp_pivot(int length, Rng& rng) {
  int lo = static_cast<int>(std::ceil(0.1 * length));
  int hi = static_cast<int>(std::floor(0.9 * length));
  lo = std::clamp(lo, 1, length - 1);
  hi = std::clamp(hi, 1, length - 1);
  return static_cast<int>(rng.uniform_int(lo, hi));
}

std::vector<double> ntp_pretrain(Seq2Seq& actor, const Vocabulary& vocab,
                  std::span<const std::vector<minilang::Token>> programs,
                  const TrainConfig& config, Rng& rng, MetricsLog* log) {
  std::vector<std::vector<int>> encoded;
  encoded.reserve(programs.size());
  for (const auto& program : programs) {
    auto ids = vocab.ids_of_program(program);
    if (ids.size() >= 2) encoded.push_back(std::move(ids));
  }

  std::vector<double> epoch_losses;
  auto order = index_range(encoded.size());
  for (int epoch = 0; epoch < config.epochs_pretrain; ++epoch) {
    shuffle_indices(order, rng);
    double epoch_loss = 0.0;
    std::size_t seen = 0;
    for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
      const std::size_t stop = std::min(order.size(), start + config.batch_size);
      Tape tape;
      Tensor batch_loss;
      for (std::size_t i = start; i < stop; ++i) {
        const std::vector<int>& ids = encoded[order[i]];
        PivotSplit split = pivot_split(vocab, ids, ntp_pivot(static_cast<int>(ids.size()), rng));
        Tensor nll = actor.log_prob(split.source, split.target).total_nll;
        batch_loss = batch_loss.defined() ? diffkit::add(batch_loss, nll) : nll;
      }
      batch_loss = diffkit::scale(batch_loss, 1.0 / static_cast<double>(stop - start));
      epoch_loss += batch_loss.value() * static_cast<double>(stop - start);
      seen += stop - start;
      tape.backward(batch_loss);
      diffkit::adam_step(actor.params(), config.lr_pretrain);
    }
    epoch_losses.push_back(seen == 0 ? 0.0 : epoch_loss / static_cast<double>(seen));
    if (log != nullptr) {
      log->append("pretrain", epoch, {{"loss", epoch_losses.back()}});
    }
  }
  return epoch_losses;
}

double suffix_nll(const Seq2Seq& actor, const Vocabulary& vocab,
                  std::span<const std::vector<minilang::Token>> programs, Rng& rng) {
  Tape::NoGrad guard;
  double total = 0.0;
  std::size_t tokens = 0;
  for (const auto& program : programs) {
    auto ids = vocab.ids_of_program(program);
    if (ids.size() < 2) continue;
    PivotSplit split = pivot_split(vocab, ids, ntp_pivot(static_cast<int>(ids.size()), rng));
    auto tf = actor.log_prob(split.source, split.target);
    total -= tf.total_logp;
    tokens += tf.token_logp.size();
  }
  return tokens == 0 ? 0.0 : total / static_cast<double>(tokens);
}

std::vector<double> ce_warmstart(Seq2Seq& actor, const Vocabulary& vocab,
                                 const corpus::Dataset& dataset, const TrainConfig& config,
                                 Rng& rng, MetricsLog* log) {
  if (config.epochs_warmstart > 10) {
    throw std::invalid_argument("warm start is capped at 10 epochs");
  }
  std::vector<std::vector<int>> sources, targets;
  for (const corpus::ProblemSpec& problem : dataset.problems) {
    corpus::EncodedPair pair = corpus::encode(vocab, problem);
    sources.push_back(std::move(pair.source));
    targets.push_back(vocab.ids_of_program(problem.ground_truth));
  }

  std::vector<double> epoch_losses;
  auto order = index_range(sources.size());
  for (int epoch = 0; epoch < config.epochs_warmstart; ++epoch) {
    shuffle_indices(order, rng);
    double epoch_loss = 0.0;
    std::size_t seen = 0;
    for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
      const std::size_t stop = std::min(order.size(), start + config.batch_size);
      Tape tape;
      Tensor batch_loss;
      for (std::size_t i = start; i < stop; ++i) {
        Tensor nll = actor.log_prob(sources[order[i]], targets[order[i]]).total_nll;
        batch_loss = batch_loss.defined() ? diffkit::add(batch_loss, nll) : nll;
      }
      batch_loss = diffkit::scale(batch_loss, 1.0 / static_cast<double>(stop - start));
      epoch_loss += batch_loss.value() * static_cast<double>(stop - start);
      seen += stop - start;
      tape.backward(batch_loss);
      diffkit::adam_step(actor.params(), config.lr_warmstart);
    }
    epoch_losses.push_back(seen == 0 ? 0.0 : epoch_loss / static_cast<double>(seen));
    if (log != nullptr) {
      log->append("warmstart", epoch, {{"loss", epoch_losses.back()}});
    }
  }
  return epoch_losses;
}

std::vector<LabeledSample> collect_synthetic(const Seq2Seq& actor, const Vocabulary& vocab,
                                             const corpus::Dataset& dataset,
                                             const TrainConfig& config, Rng& rng) {
  std::vector<LabeledSample> samples;
  samples.reserve(dataset.problems.size() * (config.samples_per_problem + 1));
  for (const corpus::ProblemSpec& problem : dataset.problems) {
    const auto source = corpus::encode_source(vocab, problem.description);
    for (int s = 0; s < config.samples_per_problem; ++s) {
      auto drawn = actor.sample(source, config.collect_temperature, config.collect_top_p,
                                config.max_program_len, rng);
      auto report = corpus::evaluate_ids(vocab, drawn.tokens, problem.hidden_tests);
      LabeledSample sample;
      sample.problem_id = problem.id;
      sample.program = std::move(drawn.tokens);
      sample.outcome = report.category;
      sample.subtype = report.subtype;
      sample.source = LabeledSample::Source::Sampled;
      samples.push_back(std::move(sample));
    }
    LabeledSample truth;
    truth.problem_id = problem.id;
    truth.program = vocab.ids_of_program(problem.ground_truth);
    truth.outcome = minilang::Outcome::PassedTest;
    truth.subtype = minilang::ErrorSubtype::None;
    truth.source = LabeledSample::Source::GroundTruth;
    samples.push_back(std::move(truth));
  }
  return samples;
}

double train_critic(Seq2Seq& critic, const Vocabulary& vocab,
                    std::span<const LabeledSample> samples, const corpus::Dataset& dataset,
                    const TrainConfig& config, Rng& rng, MetricsLog* log) {
  if (critic.config().head != 4) throw std::invalid_argument("outcome critic needs a 4-way head");
  return train_classifier(
      critic, vocab, samples, dataset,
      [](const LabeledSample& s) { return static_cast<int>(s.outcome); }, config, rng, log,
      "train-critic");
}

double train_test_critic(Seq2Seq& test_critic, const Vocabulary& vocab,
                         std::span<const LabeledSample> samples,
                         const corpus::Dataset& dataset, const TrainConfig& config, Rng& rng,
                         MetricsLog* log) {
  if (test_critic.config().head != 2) {
    throw std::invalid_argument("test critic needs a binary head");
  }
  return train_classifier(
      test_critic, vocab, samples, dataset,
      [](const LabeledSample& s) {
        return s.outcome == minilang::Outcome::PassedTest ? 1 : 0;
      },
      config, rng, log, "train-test-critic");
}

Tensor rl_surrogate_loss(const Seq2Seq& actor, std::span<const int> source,
                         std::span<const int> sampled_tokens,
                         std::span<const double> token_values, double advantage) {
  if (sampled_tokens.empty()) throw std::invalid_argument("empty sampled program");
  if (sampled_tokens.size() != token_values.size()) {
    throw std::invalid_argument("token value count mismatch");
  }
  auto tf = actor.log_prob(source, sampled_tokens);
  Tensor loss;
  for (std::size_t t = 0; t < sampled_tokens.size(); ++t) {
    Tensor term = diffkit::scale(tf.token_nll[t], advantage * token_values[t]);
    loss = loss.defined() ? diffkit::add(loss, term) : term;
  }
  return loss;
}

RlLosses rl_losses(const Seq2Seq& actor, const Seq2Seq* critic, std::span<const int> source,
                   std::span<const int> ground_truth, const OutcomeFn& outcome_of,
                   const TrainConfig& config, Rng& rng) {
  RlLosses out;
  auto sampled = actor.sample(source, config.rl_temperature, config.rl_top_p,
                              config.max_program_len, rng);
  auto sample_report = outcome_of(sampled.tokens);
  out.sample_outcome = sample_report.category;
  out.sample_return = return_of(sample_report);
  if (config.rl_baseline) {
    auto baseline = actor.greedy(source, config.max_program_len);
    out.baseline_return = return_of(outcome_of(baseline));
    out.advantage = out.sample_return - out.baseline_return;
  } else {
    out.advantage = out.sample_return;
  }

  out.loss_ce = actor.log_prob(source, ground_truth).total_nll;

  if (out.advantage != 0.0 && !sampled.tokens.empty()) {
    const std::size_t t_len = sampled.tokens.size();
    std::vector<double> values(t_len, 1.0);
    switch (config.critic_mode) {
      case CriticMode::Constant:
        break;
      case CriticMode::Distance:
        for (std::size_t t = 0; t < t_len; ++t) {
          values[t] = static_cast<double>(t_len - t) / static_cast<double>(t_len);
        }
        break;
      case CriticMode::Learned: {
        if (critic == nullptr) throw std::invalid_argument("learned critic mode needs a critic");
        Tape::NoGrad guard;  // q values are constants; nothing reaches the critic
        auto critic_out = critic->critic_forward(source, sampled.tokens);
        values = models::token_values(critic_out, sample_report.category);
        break;
      }
    }
    out.loss_rl = rl_surrogate_loss(actor, source, sampled.tokens, values, out.advantage);
  }
  return out;
}

RlStepResult rl_step(Seq2Seq& actor, const Seq2Seq* critic, const corpus::ProblemSpec& problem,
                     const Vocabulary& vocab, const TrainConfig& config, Rng& rng) {
  const auto source = corpus::encode_source(vocab, problem.description);
  const auto target = vocab.ids_of_program(problem.ground_truth);
  OutcomeFn outcome_of = [&](std::span<const int> program) {
    return corpus::evaluate_ids(vocab, program, problem.hidden_tests);
  };

  Tape tape;
  RlLosses losses = rl_losses(actor, critic, source, target, outcome_of, config, rng);
  Tensor total = diffkit::scale(losses.loss_ce, config.weight_ce);
  if (losses.loss_rl.defined()) {
    total = diffkit::add(total, diffkit::scale(losses.loss_rl, config.weight_rl));
  }
  tape.backward(total);
  diffkit::adam_step(actor.params(), config.lr_rl);

  RlStepResult result;
  result.loss_ce = losses.loss_ce.value();
  result.loss_rl = losses.loss_rl.defined() ? losses.loss_rl.value() : 0.0;
  result.advantage = losses.advantage;
  return result;
}

std::vector<RlEpochStats> rl_finetune(Seq2Seq& actor, const Seq2Seq* critic,
                                      const Vocabulary& vocab, const corpus::Dataset& dataset,
                                      const TrainConfig& config, Rng& rng, MetricsLog* log) {
  const auto sources = source_index(vocab, dataset);
  const auto targets = target_index(vocab, dataset);

  std::vector<RlEpochStats> stats;
  auto order = index_range(dataset.problems.size());
  for (int epoch = 0; epoch < config.epochs_rl; ++epoch) {
    shuffle_indices(order, rng);
    double epoch_ce = 0.0, epoch_rl = 0.0, epoch_adv = 0.0;
    int passed = 0;
    for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
      const std::size_t stop = std::min(order.size(), start + config.batch_size);
      Tape tape;
      Tensor batch_loss;
      for (std::size_t i = start; i < stop; ++i) {
        const corpus::ProblemSpec& problem = dataset.problems[order[i]];
        OutcomeFn outcome_of = [&](std::span<const int> program) {
          return corpus::evaluate_ids(vocab, program, problem.hidden_tests);
        };
        RlLosses losses = rl_losses(actor, critic, sources.at(problem.id),
                                    targets.at(problem.id), outcome_of, config, rng);
        Tensor term = diffkit::scale(losses.loss_ce, config.weight_ce);
        if (losses.loss_rl.defined()) {
          term = diffkit::add(term, diffkit::scale(losses.loss_rl, config.weight_rl));
        }
        batch_loss = batch_loss.defined() ? diffkit::add(batch_loss, term) : term;
        epoch_ce += losses.loss_ce.value();
        epoch_rl += losses.loss_rl.defined() ? losses.loss_rl.value() : 0.0;
        epoch_adv += losses.advantage;
        passed += losses.sample_outcome == minilang::Outcome::PassedTest ? 1 : 0;
      }
      batch_loss = diffkit::scale(batch_loss, 1.0 / static_cast<double>(stop - start));
      tape.backward(batch_loss);
      diffkit::adam_step(actor.params(), config.lr_rl);
    }
    const double n = static_cast<double>(order.size());
    stats.push_back({epoch_ce / n, epoch_rl / n, epoch_adv / n,
                     static_cast<double>(passed) / n});
    if (log != nullptr) {
      log->append("train-rl", epoch,
                  {{"loss_ce", stats.back().loss_ce},
                   {"loss_rl", stats.back().loss_rl},
                   {"mean_advantage", stats.back().mean_advantage},
                   {"sample_pass_rate", stats.back().sample_pass_rate}});
    }
  }
  return stats;
}

std::vector<double> train_repair(Seq2Seq& repair_model, const Vocabulary& vocab,
                                 std::span<const LabeledSample> samples,
                                 const corpus::Dataset& dataset, const TrainConfig& config,
                                 Rng& rng, MetricsLog* log) {
  std::unordered_map<std::string, const corpus::ProblemSpec*> problems;
  for (const corpus::ProblemSpec& p : dataset.problems) problems.emplace(p.id, &p);

  std::vector<std::vector<int>> inputs, targets;
  for (const LabeledSample& sample : samples) {
    if (sample.outcome == minilang::Outcome::PassedTest) continue;  // bugs only
    const corpus::ProblemSpec& problem = *problems.at(sample.problem_id);
    const auto description = vocab.ids_of(problem.description);
    inputs.push_back(models::repair_input(vocab, description, sample.program, sample.outcome,
                                          sample.subtype));
    targets.push_back(vocab.ids_of_program(problem.ground_truth));
  }
  std::vector<double> epoch_losses;
  if (inputs.empty()) return epoch_losses;

  auto order = index_range(inputs.size());
  for (int epoch = 0; epoch < config.epochs_repair; ++epoch) {
    shuffle_indices(order, rng);
    double epoch_loss = 0.0;
    std::size_t seen = 0;
    for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
      const std::size_t stop = std::min(order.size(), start + config.batch_size);
      Tape tape;
      Tensor batch_loss;
      for (std::size_t i = start; i < stop; ++i) {
        Tensor nll = repair_model.log_prob(inputs[order[i]], targets[order[i]]).total_nll;
        batch_loss = batch_loss.defined() ? diffkit::add(batch_loss, nll) : nll;
      }
      batch_loss = diffkit::scale(batch_loss, 1.0 / static_cast<double>(stop - start));
      epoch_loss += batch_loss.value() * static_cast<double>(stop - start);
      seen += stop - start;
      tape.backward(batch_loss);
      diffkit::adam_step(repair_model.params(), config.lr_repair);
    }
    epoch_losses.push_back(seen == 0 ? 0.0 : epoch_loss / static_cast<double>(seen));
    if (log != nullptr) {
      log->append("train-repair", epoch, {{"loss", epoch_losses.back()}});
    }
  }
  return epoch_losses;
}

}  // namespace synthrl::training
