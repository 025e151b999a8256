#pragma once

#include <cstdint>
#include <string>

namespace synthrl::training {

enum class CriticMode { Learned, Constant, Distance };

struct TrainConfig {
  double lr_pretrain = 1e-3;
  double lr_warmstart = 1e-3;
  double lr_critic = 1e-3;
  double lr_rl = 3e-4;
  double lr_repair = 1e-3;

  int epochs_pretrain = 3;
  int epochs_warmstart = 10;  // capped at 10
  int epochs_critic = 10;
  int epochs_rl = 4;
  int epochs_repair = 10;

  int batch_size = 16;
  int samples_per_problem = 20;  // S

  double collect_temperature = 1.0;
  double collect_top_p = 0.95;
  double rl_temperature = 1.0;  // W^s is drawn from the model distribution
  double rl_top_p = 1.0;

  int max_program_len = 94;  // keeps BOS + program + EOS within the target limit

  double weight_ce = 1.0;
  double weight_rl = 1.0;
  bool rl_baseline = true;
  CriticMode critic_mode = CriticMode::Learned;

  std::uint64_t seed = 7;
};

}  // namespace synthrl::training
