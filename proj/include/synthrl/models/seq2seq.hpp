#pragma once

#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "synthrl/diffkit/checkpoint.hpp"
#include "synthrl/diffkit/ops.hpp"
#include "synthrl/diffkit/optim.hpp"
#include "synthrl/rng.hpp"

namespace synthrl::models {

struct ModelConfig {
  std::string role = "actor";  // actor | critic | test_critic | repair
  int vocab = 0;
  int embed = 64;
  int hidden = 128;
  int attn = 64;
  int head = 0;              // output width: |V| for generators, 4 / 2 for critics
  bool shared_heads = true;  // critic: per-token and pooled heads share weights
  int bos = 1;               // special ids, fixed by the vocabulary layout
  int eos = 2;

  static ModelConfig actor(int vocab, int embed = 64, int hidden = 128);
  static ModelConfig critic(int vocab, int embed = 32, int hidden = 64);
  static ModelConfig test_critic(int vocab, int embed = 32, int hidden = 64);
  static ModelConfig repair(int vocab, int embed = 64, int hidden = 128);
};

// One recurrent encoder-decoder with additive attention over encoder
// states, used for every model role. The decoder consumes one token per
// step and exposes its hidden state; generator roles project the state to
// vocabulary logits, critic roles to outcome logits.
class Seq2Seq {
 public:
  Seq2Seq(ModelConfig config, std::uint64_t init_seed);

  const ModelConfig& config() const { return config_; }
  diffkit::ParameterStore& params() { return params_; }
  const diffkit::ParameterStore& params() const { return params_; }

  struct Encoded {
    diffkit::Tensor states;  // (T x H)
    diffkit::Tensor proj;    // (T x A), precomputed attention keys
    diffkit::Tensor last;    // (1 x H), initial decoder state
  };
  Encoded encode(std::span<const int> source) const;

  // One decoder step: attends with the current state, consumes `token`,
  // advances `state` in place and returns the head logits (1 x head).
  diffkit::Tensor decoder_step(const Encoded& encoded, diffkit::Tensor& state,
                               int token) const;

  // Teacher-forced pass over target ++ EOS. token_nll[t] is
  // -log p(target[t] | target[:t], source); the last entry is the EOS
  // prediction. total_nll is their sum (the cross-entropy loss).
  struct TeacherForced {
    std::vector<diffkit::Tensor> token_nll;
    diffkit::Tensor total_nll;
    std::vector<double> token_logp;
    double total_logp = 0.0;
  };
  TeacherForced log_prob(std::span<const int> source, std::span<const int> target) const;

  struct Sampled {
    std::vector<int> tokens;              // generated ids, EOS excluded
    std::vector<double> token_logp;       // aligned with tokens
    bool hit_max_len = false;
  };
  // Nucleus sampling until EOS or max_len; never records on a tape.
  Sampled sample(std::span<const int> source, double temperature, double top_p,
                 int max_len, Rng& rng) const;
  // Teacher-forces `prefix`, then samples the continuation. The output
  // begins with `prefix` verbatim.
  Sampled sample_with_prefix(std::span<const int> source, std::span<const int> prefix,
                             double temperature, double top_p, int max_len,
                             Rng& rng) const;
  // Argmax decoding, ties toward the smaller token id.
  std::vector<int> greedy(std::span<const int> source, int max_len) const;

  // Critic roles: per-token logits from each decoder state plus pooled
  // logits from the columnwise max over time, both through the same head
  // when shared_heads is set. The program must be non-empty.
  struct CriticOutput {
    std::vector<diffkit::Tensor> token_logits;  // each (1 x head)
    diffkit::Tensor pooled_logits;              // (1 x head)
  };
  CriticOutput critic_forward(std::span<const int> source,
                              std::span<const int> program) const;

  // Binary-head convenience: PassedTest probability after each prefix
  // w_{1:t}. States are causal, so p_t depends only on tokens up to t.
  std::vector<double> prefix_pass_values(std::span<const int> source,
                                         std::span<const int> program) const;

  nlohmann::json metadata() const;
  void save(const std::string& path, const nlohmann::json& extra = {}) const;
  static Seq2Seq from_checkpoint(const diffkit::Checkpoint& checkpoint);

  // Deep copy of the parameter values with fresh optimizer state.
  Seq2Seq clone() const;

 private:
  struct Gru {
    diffkit::Tensor wz, uz, bz, wr, ur, br, wh, uh, bh;
  };

  Gru make_gru(const std::string& prefix, int input_dim);
  diffkit::Tensor gru_step(const Gru& gru, const diffkit::Tensor& input,
                           const diffkit::Tensor& state) const;
  diffkit::Tensor head(const diffkit::Tensor& state, bool pooled) const;

  ModelConfig config_;
  diffkit::ParameterStore params_;
  diffkit::Tensor embed_;
  Gru enc_, dec_;
  diffkit::Tensor attn_enc_, attn_dec_, attn_v_;
  diffkit::Tensor out_w_, out_b_;
  diffkit::Tensor pool_w_, pool_b_;  // only when !shared_heads
};

// Softmax over one row of critic logits, as plain values.
std::vector<double> softmax_values(const diffkit::Tensor& logits);

}  // namespace synthrl::models
