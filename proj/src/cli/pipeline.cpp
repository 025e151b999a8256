#include "synthrl/cli/pipeline.hpp"

#include <atomic>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <optional>
#include <thread>
#include <unordered_map>

#include "json.hpp"
#include "synthrl/corpus/dataset_io.hpp"
#include "synthrl/corpus/encode.hpp"
#include "synthrl/corpus/generate.hpp"
#include "synthrl/eval/metrics.hpp"
#include "synthrl/inference/critic_sampling.hpp"
#include "synthrl/training/trainer.hpp"

namespace synthrl::cli {

namespace fs = std::filesystem;
using nlohmann::json;
using corpus::Vocabulary;
using models::ModelConfig;
using models::Seq2Seq;

namespace paths {

std::string dataset(const RunConfig& c, const std::string& split) {
  return c.out_dir + "/dataset_" + split + ".jsonl";
}
std::string checkpoint(const RunConfig& c, const std::string& stage) {
  return c.out_dir + "/" + stage + ".ckpt";
}
std::string samples(const RunConfig& c) { return c.out_dir + "/samples.jsonl"; }
std::string generations(const RunConfig& c) { return c.out_dir + "/generations.jsonl"; }
std::string eval_records(const RunConfig& c) { return c.out_dir + "/eval_records.jsonl"; }
std::string report_csv(const RunConfig& c) { return c.out_dir + "/report.csv"; }
std::string report_txt(const RunConfig& c) { return c.out_dir + "/report.txt"; }
std::string metrics(const RunConfig& c) { return c.out_dir + "/metrics.jsonl"; }
std::string trace(const RunConfig& c) { return c.out_dir + "/trace.jsonl"; }

}  // namespace paths

namespace {

void require_artifact(const std::string& path, const std::string& producer) {
  if (!fs::exists(path)) {
    throw PrerequisiteError("missing " + path + "; run '" + producer + "' first");
  }
}

void check_hash(const std::string& artifact, const std::string& found,
                const RunConfig& config) {
  if (found != config.hash()) {
    throw PrerequisiteError("config hash mismatch for " + artifact + " (found " + found +
                            ", config is " + config.hash() + ")");
  }
}

training::MetricsLog metrics_log(const RunConfig& config) {
  return training::MetricsLog(paths::metrics(config), config.hash(), config.seed);
}

ModelConfig actor_config(const RunConfig& c, const Vocabulary& vocab, const char* role) {
  ModelConfig mc = ModelConfig::actor(vocab.size(), c.actor_embed, c.actor_hidden);
  mc.role = role;
  return mc;
}

ModelConfig critic_config(const RunConfig& c, const Vocabulary& vocab, int head) {
  ModelConfig mc = ModelConfig::critic(vocab.size(), c.critic_embed, c.critic_hidden);
  mc.head = head;
  if (head == 2) mc.role = "test_critic";
  return mc;
}

Seq2Seq load_model(const RunConfig& config, const std::string& stage,
                   const std::string& producer) {
  const std::string path = paths::checkpoint(config, stage);
  require_artifact(path, producer);
  auto checkpoint = diffkit::load_checkpoint(path);
  check_hash(path, checkpoint.metadata.value("config_hash", ""), config);
  return Seq2Seq::from_checkpoint(checkpoint);
}

void save_model(const RunConfig& config, const Seq2Seq& model, const std::string& stage) {
  fs::create_directories(config.out_dir);
  model.save(paths::checkpoint(config, stage),
             {{"config_hash", config.hash()}, {"stage", stage}});
}

corpus::Dataset load_split(const RunConfig& config, const std::string& split) {
  const std::string path = paths::dataset(config, split);
  require_artifact(path, "gen-data");
  return corpus::load_dataset(path);
}

// Header-tagged JSON Lines writers/readers for the non-checkpoint artifacts.
void write_jsonl(const std::string& path, const json& header,
                 const std::vector<json>& rows) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << header.dump() << '\n';
  for (const json& row : rows) out << row.dump() << '\n';
}

std::pair<json, std::vector<json>> read_jsonl(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::string line;
  json header;
  std::vector<json> rows;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    json j = json::parse(line);
    if (first) {
      header = std::move(j);
      first = false;
    } else {
      rows.push_back(std::move(j));
    }
  }
  return {header, rows};
}

void parallel_for(int workers, std::size_t count,
                  const std::function<void(std::size_t)>& body) {
  if (workers <= 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  const int n_threads = std::min<int>(workers, static_cast<int>(count));
  pool.reserve(static_cast<std::size_t>(n_threads));
  for (int t = 0; t < n_threads; ++t) {
    pool.emplace_back([&] {
      for (std::size_t i = next.fetch_add(1); i < count && !failed.load();
           i = next.fetch_add(1)) {
        try {
          body(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!error) error = std::current_exception();
          failed.store(true);
        }
      }
    });
  }
  for (std::thread& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

std::uint64_t model_seed(const RunConfig& config, const char* role) {
  return Rng::keyed(config.seed, std::string("init:") + role).next_u64();
}

json sample_to_json(const Vocabulary& vocab, const training::LabeledSample& sample) {
  return json{{"problem_id", sample.problem_id},
              {"tokens", vocab.tokens_of(sample.program)},
              {"outcome", minilang::outcome_name(sample.outcome)},
              {"subtype", minilang::subtype_name(sample.subtype)},
              {"source",
               sample.source == training::LabeledSample::Source::GroundTruth ? "ground_truth"
                                                                             : "sampled"}};
}

training::LabeledSample sample_from_json(const Vocabulary& vocab, const json& j) {
  training::LabeledSample sample;
  sample.problem_id = j.at("problem_id").get<std::string>();
  auto tokens = j.at("tokens").get<std::vector<std::string>>();
  sample.program = vocab.ids_of(tokens);
  sample.outcome = *minilang::outcome_from_name(j.at("outcome").get<std::string>());
  sample.subtype = *minilang::subtype_from_name(j.at("subtype").get<std::string>());
  sample.source = j.at("source").get<std::string>() == "ground_truth"
                      ? training::LabeledSample::Source::GroundTruth
                      : training::LabeledSample::Source::Sampled;
  return sample;
}

std::vector<training::LabeledSample> load_samples(const RunConfig& config,
                                                  const Vocabulary& vocab) {
  const std::string path = paths::samples(config);
  require_artifact(path, "collect");
  auto [header, rows] = read_jsonl(path);
  check_hash(path, header.value("config_hash", ""), config);
  std::vector<training::LabeledSample> samples;
  samples.reserve(rows.size());
  for (const json& row : rows) samples.push_back(sample_from_json(vocab, row));
  return samples;
}

}  // namespace

void stage_gen_data(const RunConfig& config) {
  fs::create_directories(config.out_dir);
  corpus::DatasetConfig base;
  base.tier1_frac = config.tier1_frac;
  base.tier2_frac = config.tier2_frac;
  base.tier3_frac = config.tier3_frac;

  corpus::DatasetConfig train = base;
  train.problems = config.train_problems;
  train.split = "train";
  train.seed = config.data_seed;
  corpus::save_dataset(corpus::generate_dataset(train), paths::dataset(config, "train"));

  corpus::DatasetConfig test = base;
  test.problems = config.test_problems;
  test.split = "test";
  test.seed = config.data_seed + 1;
  corpus::save_dataset(corpus::generate_dataset(test), paths::dataset(config, "test"));
}

void stage_pretrain(const RunConfig& config) {
  Vocabulary vocab;
  Seq2Seq actor(actor_config(config, vocab, "actor"), model_seed(config, "actor"));

  Rng corpus_rng = Rng::keyed(config.seed, "pretrain-corpus");
  std::vector<std::vector<minilang::Token>> programs;
  programs.reserve(static_cast<std::size_t>(config.pretrain_programs));
  for (int i = 0; i < config.pretrain_programs; ++i) {
    const double roll = corpus_rng.next_double();
    const int tier = roll < config.tier1_frac                       ? 1
                     : roll < config.tier1_frac + config.tier2_frac ? 2
                                                                    : 3;
    programs.push_back(corpus::random_program(tier, corpus_rng));
  }

  auto log = metrics_log(config);
  Rng rng = Rng::keyed(config.seed, "pretrain");
  training::ntp_pretrain(actor, vocab, programs, config.train, rng, &log);
  save_model(config, actor, "actor_pretrained");
}

void stage_warmstart(const RunConfig& config) {
  Vocabulary vocab;
  corpus::Dataset dataset = load_split(config, "train");
  Seq2Seq actor = load_model(config, "actor_pretrained", "pretrain");
  auto log = metrics_log(config);
  Rng rng = Rng::keyed(config.seed, "warmstart");
  training::ce_warmstart(actor, vocab, dataset, config.train, rng, &log);
  save_model(config, actor, "actor_warmstart");
}

void stage_collect(const RunConfig& config) {
  Vocabulary vocab;
  corpus::Dataset dataset = load_split(config, "train");
  Seq2Seq actor = load_model(config, "actor_warmstart", "warmstart");
  Rng rng = Rng::keyed(config.seed, "collect");
  auto samples = training::collect_synthetic(actor, vocab, dataset, config.train, rng);

  std::vector<json> rows;
  rows.reserve(samples.size());
  for (const auto& sample : samples) rows.push_back(sample_to_json(vocab, sample));
  write_jsonl(paths::samples(config), {{"config_hash", config.hash()}, {"seed", config.seed}},
              rows);
}

void stage_train_critic(const RunConfig& config) {
  Vocabulary vocab;
  corpus::Dataset dataset = load_split(config, "train");
  auto samples = load_samples(config, vocab);

  auto log = metrics_log(config);
  Seq2Seq critic(critic_config(config, vocab, 4), model_seed(config, "critic"));
  Rng rng = Rng::keyed(config.seed, "train-critic");
  training::train_critic(critic, vocab, samples, dataset, config.train, rng, &log);
  save_model(config, critic, "critic");

  Seq2Seq test_critic(critic_config(config, vocab, 2), model_seed(config, "test_critic"));
  Rng rng2 = Rng::keyed(config.seed, "train-test-critic");
  training::train_test_critic(test_critic, vocab, samples, dataset, config.train, rng2, &log);
  save_model(config, test_critic, "test_critic");
}

void stage_train_rl(const RunConfig& config) {
  Vocabulary vocab;
  corpus::Dataset dataset = load_split(config, "train");
  Seq2Seq actor = load_model(config, "actor_warmstart", "warmstart");
  Seq2Seq critic = load_model(config, "critic", "train-critic");

  auto log = metrics_log(config);
  Rng rng = Rng::keyed(config.seed, "train-rl");
  const Seq2Seq* critic_ptr =
      config.train.critic_mode == training::CriticMode::Learned ? &critic : nullptr;
  training::rl_finetune(actor, critic_ptr, vocab, dataset, config.train, rng, &log);
  save_model(config, actor, "actor_rl");
}

void stage_train_repair(const RunConfig& config) {
  Vocabulary vocab;
  corpus::Dataset dataset = load_split(config, "train");
  auto samples = load_samples(config, vocab);
  Seq2Seq repair_model(actor_config(config, vocab, "repair"), model_seed(config, "repair"));
  auto log = metrics_log(config);
  Rng rng = Rng::keyed(config.seed, "train-repair");
  training::train_repair(repair_model, vocab, samples, dataset, config.train, rng, &log);
  save_model(config, repair_model, "repair");
}

void stage_generate(const RunConfig& config) {
  Vocabulary vocab;
  corpus::Dataset dataset = load_split(config, "test");
  const std::string actor_stage =
      config.eval_actor == "rl" ? "actor_rl" : "actor_warmstart";
  const std::string actor_producer = config.eval_actor == "rl" ? "train-rl" : "warmstart";
  Seq2Seq actor = load_model(config, actor_stage, actor_producer);
  Seq2Seq test_critic = load_model(config, "test_critic", "train-critic");

  std::optional<Seq2Seq> repair_model;
  if (config.cs.mode == inference::CsMode::RefineRepair) {
    repair_model.emplace(load_model(config, "repair", "train-repair"));
  }

  std::vector<std::vector<json>> traces(dataset.problems.size());
  std::vector<json> rows(dataset.problems.size());
  parallel_for(config.workers, dataset.problems.size(), [&](std::size_t i) {
    const corpus::ProblemSpec& problem = dataset.problems[i];
    Rng rng = Rng::keyed(config.seed, "generate:" + problem.id);
    inference::TraceSink sink = [&](const json& record) { traces[i].push_back(record); };
    const inference::TraceSink* sink_ptr = config.trace ? &sink : nullptr;
    auto batch = inference::critic_sampling(
        actor, test_critic, repair_model ? &*repair_model : nullptr, vocab, problem,
        config.cs, rng, sink_ptr);

    json programs = json::array();
    for (const auto& candidate : batch.programs) {
      programs.push_back(
          {{"tokens", vocab.tokens_of(candidate.tokens)},
           {"mean_logp", candidate.mean_logp},
           {"critic_score", candidate.critic_score},
           {"example_category", minilang::outcome_name(candidate.example_report.category)},
           {"example_subtype", minilang::subtype_name(candidate.example_report.subtype)}});
    }
    rows[i] = json{{"problem_id", problem.id}, {"tier", problem.tier},
                   {"programs", std::move(programs)}};
  });

  write_jsonl(paths::generations(config),
              {{"config_hash", config.hash()},
               {"actor", config.eval_actor},
               {"cs_mode", static_cast<int>(config.cs.mode)},
               {"n", config.cs.n}},
              rows);
  if (config.trace) {
    std::vector<json> flat;
    for (const auto& per_problem : traces) {
      flat.insert(flat.end(), per_problem.begin(), per_problem.end());
    }
    write_jsonl(paths::trace(config), {{"config_hash", config.hash()}}, flat);
  }
}

void stage_evaluate(const RunConfig& config) {
  Vocabulary vocab;
  corpus::Dataset dataset = load_split(config, "test");
  const std::string path = paths::generations(config);
  require_artifact(path, "generate");
  auto [header, rows] = read_jsonl(path);
  check_hash(path, header.value("config_hash", ""), config);

  std::unordered_map<std::string, const corpus::ProblemSpec*> problems;
  for (const auto& p : dataset.problems) problems.emplace(p.id, &p);

  std::vector<json> out_rows(rows.size());
  parallel_for(config.workers, rows.size(), [&](std::size_t i) {
    const json& row = rows[i];
    const auto it = problems.find(row.at("problem_id").get<std::string>());
    if (it == problems.end()) {
      throw std::runtime_error("generations reference unknown problem");
    }
    const corpus::ProblemSpec& problem = *it->second;
    json programs = json::array();
    for (const json& program : row.at("programs")) {
      const auto tokens = vocab.ids_of(program.at("tokens").get<std::vector<std::string>>());
      const auto hidden = corpus::evaluate_ids(vocab, tokens, problem.hidden_tests);
      json entry = program;
      entry["hidden_category"] = minilang::outcome_name(hidden.category);
      entry["hidden_subtype"] = minilang::subtype_name(hidden.subtype);
      entry.erase("tokens");
      programs.push_back(std::move(entry));
    }
    out_rows[i] = json{{"problem_id", problem.id},
                       {"tier", problem.tier},
                       {"programs", std::move(programs)}};
  });

  write_jsonl(paths::eval_records(config), {{"config_hash", config.hash()}}, out_rows);
}

namespace {

std::vector<eval::EvalRecord> records_from_rows(const std::vector<json>& rows) {
  std::vector<eval::EvalRecord> records;
  records.reserve(rows.size());
  for (const json& row : rows) {
    eval::EvalRecord record;
    record.problem_id = row.at("problem_id").get<std::string>();
    record.tier = row.at("tier").get<int>();
    for (const json& program : row.at("programs")) {
      eval::ProgramRecord p;
      p.hidden_category =
          *minilang::outcome_from_name(program.at("hidden_category").get<std::string>());
      p.hidden_subtype =
          *minilang::subtype_from_name(program.at("hidden_subtype").get<std::string>());
      p.example_category =
          *minilang::outcome_from_name(program.at("example_category").get<std::string>());
      p.example_subtype =
          *minilang::subtype_from_name(program.at("example_subtype").get<std::string>());
      p.mean_logp = program.at("mean_logp").get<double>();
      p.critic_score = program.at("critic_score").get<double>();
      record.programs.push_back(p);
    }
    records.push_back(std::move(record));
  }
  return records;
}

}  // namespace

void stage_report(const RunConfig& config, const std::vector<std::string>& run_dirs) {
  std::vector<eval::MetricRow> all_rows;
  const bool multi = run_dirs.size() > 1;
  for (const std::string& dir : run_dirs) {
    const std::string path = dir + "/eval_records.jsonl";
    require_artifact(path, "evaluate");
    auto [header, rows] = read_jsonl(path);
    auto records = records_from_rows(rows);
    auto metric_rows = eval::standard_rows(records, config.eval_ks, config.eval_ns);
    if (multi) {
      const std::string label = fs::path(dir).filename().string();
      for (auto& row : metric_rows) row.metric = label + ":" + row.metric;
    }
    all_rows.insert(all_rows.end(), metric_rows.begin(), metric_rows.end());
  }

  fs::create_directories(config.out_dir);
  {
    std::ofstream csv(paths::report_csv(config), std::ios::binary);
    csv << "# config_hash=" << config.hash() << '\n';
    csv << eval::render_csv(all_rows);
  }
  {
    std::ofstream txt(paths::report_txt(config), std::ios::binary);
    txt << "# config_hash=" << config.hash() << '\n';
    txt << eval::render_summary(all_rows);
  }
}

void run_full_pipeline(const RunConfig& config) {
  stage_gen_data(config);
  stage_pretrain(config);
  stage_warmstart(config);
  stage_collect(config);
  stage_train_critic(config);
  stage_train_rl(config);
  stage_train_repair(config);
  stage_generate(config);
  stage_evaluate(config);
  stage_report(config, {config.out_dir});
}

}  // namespace synthrl::cli
