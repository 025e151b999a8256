// Command-line driver for the program-synthesis RL pipeline. Stages run in
// prerequisite order: gen-data -> pretrain -> warmstart -> collect ->
// train-critic -> {train-rl, train-repair} -> generate -> evaluate ->
// report. Every artifact is reproducible from (config, seed).

#include <cstdio>
#include <exception>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "synthrl/cli/pipeline.hpp"
#include "synthrl/cli/run_config.hpp"
#include "synthrl/corpus/dataset_io.hpp"
#include "synthrl/diffkit/checkpoint.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitPrerequisite = 3;
constexpr int kExitInvariant = 4;

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"desk-scale program synthesis with actor-critic RL over a mini language"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_override;
  app.add_option("-c,--config", config_path, "path to the run configuration file")
      ->required();
  app.add_option("-o,--out", out_override, "override the output directory");

  std::vector<std::string> report_dirs;

  struct Command {
    const char* name;
    const char* help;
    void (*run)(const synthrl::cli::RunConfig&);
  };
  const Command commands[] = {
      {"gen-data", "generate the train/test problem datasets", synthrl::cli::stage_gen_data},
      {"pretrain", "pivot-split pretraining on random programs", synthrl::cli::stage_pretrain},
      {"warmstart", "supervised cross-entropy finetuning", synthrl::cli::stage_warmstart},
      {"collect", "sample and label programs from the frozen actor", synthrl::cli::stage_collect},
      {"train-critic", "train the outcome critic and the binary test critic",
       synthrl::cli::stage_train_critic},
      {"train-rl", "critic-weighted policy-gradient finetuning", synthrl::cli::stage_train_rl},
      {"train-repair", "train the error-conditioned repair model",
       synthrl::cli::stage_train_repair},
      {"generate", "run the generation pipeline on the test split",
       synthrl::cli::stage_generate},
      {"evaluate", "score generations against hidden tests", synthrl::cli::stage_evaluate},
      {"run-all", "all stages in order", synthrl::cli::run_full_pipeline},
  };
  for (const Command& command : commands) {
    app.add_subcommand(command.name, command.help);
  }
  CLI::App* report = app.add_subcommand("report", "aggregate evaluations into metric tables");
  report->add_option("dirs", report_dirs,
                     "run directories to aggregate (default: the config's out_dir)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    synthrl::cli::RunConfig config = synthrl::cli::RunConfig::load(config_path);
    if (!out_override.empty()) config.out_dir = out_override;

    for (const Command& command : commands) {
      if (app.got_subcommand(command.name)) {
        command.run(config);
        return kExitOk;
      }
    }
    if (app.got_subcommand("report")) {
      if (report_dirs.empty()) report_dirs = {config.out_dir};
      synthrl::cli::stage_report(config, report_dirs);
      return kExitOk;
    }
    std::fprintf(stderr, "no command selected\n");
    return kExitConfig;
  } catch (const synthrl::cli::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfig;
  } catch (const synthrl::cli::PrerequisiteError& e) {
    std::fprintf(stderr, "prerequisite error: %s\n", e.what());
    return kExitPrerequisite;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitInvariant;
  }
}
