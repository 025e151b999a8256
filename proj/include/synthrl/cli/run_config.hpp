#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "synthrl/inference/critic_sampling.hpp"
#include "synthrl/training/config.hpp"

namespace synthrl::cli {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct PrerequisiteError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// One flat key-value configuration file drives the whole pipeline. Every
// output artifact records hash() so stages can verify they belong to the
// same run.
struct RunConfig {
  std::uint64_t seed = 7;
  std::string out_dir = "runs/default";
  int workers = 1;

  // data
  int train_problems = 200;
  int test_problems = 50;
  double tier1_frac = 0.6;
  double tier2_frac = 0.3;
  double tier3_frac = 0.1;
  std::uint64_t data_seed = 13;

  // model dimensions
  int actor_embed = 64;
  int actor_hidden = 128;
  int critic_embed = 32;
  int critic_hidden = 64;

  // stage hyperparameters
  int pretrain_programs = 1000;
  training::TrainConfig train;

  // generation and evaluation
  inference::CsConfig cs;
  std::string eval_actor = "rl";  // rl | warmstart
  std::vector<int> eval_ks = {1, 5, 20};
  std::vector<int> eval_ns = {1, 5};
  bool trace = false;

  // Parses the file, applying SYNTHRL_OUT / SYNTHRL_WORKERS overrides.
  // Unknown keys and malformed values are ConfigErrors.
  static RunConfig load(const std::string& path);

  // Parses config text (the file body) without environment overrides.
  static RunConfig parse(const std::string& text);

  // FNV-1a over the canonical serialization of every field.
  std::string hash() const;

  std::string canonical() const;
};

}  // namespace synthrl::cli
