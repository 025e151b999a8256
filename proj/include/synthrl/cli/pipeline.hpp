#pragma once

#include <string>
#include <vector>

#include "synthrl/cli/run_config.hpp"

namespace synthrl::cli {

// Artifact names inside the run directory.
namespace paths {
std::string dataset(const RunConfig& config, const std::string& split);
std::string checkpoint(const RunConfig& config, const std::string& stage);
std::string samples(const RunConfig& config);
std::string generations(const RunConfig& config);
std::string eval_records(const RunConfig& config);
std::string report_csv(const RunConfig& config);
std::string report_txt(const RunConfig& config);
std::string metrics(const RunConfig& config);
std::string trace(const RunConfig& config);
}  // namespace paths

// Each stage validates its prerequisites (artifact presence and config
// hash), does its work, and writes hash-tagged outputs into out_dir.
void stage_gen_data(const RunConfig& config);
void stage_pretrain(const RunConfig& config);
void stage_warmstart(const RunConfig& config);
void stage_collect(const RunConfig& config);
void stage_train_critic(const RunConfig& config);
void stage_train_rl(const RunConfig& config);
void stage_train_repair(const RunConfig& config);
void stage_generate(const RunConfig& config);
void stage_evaluate(const RunConfig& config);
void stage_report(const RunConfig& config, const std::vector<std::string>& run_dirs);

// All stages in prerequisite order.
void run_full_pipeline(const RunConfig& config);

}  // namespace synthrl::cli
