#include "synthrl/models/seq2seq.hpp"

#include <cmath>
#include <stdexcept>

#include "synthrl/models/decoding.hpp"

namespace synthrl::models {

using diffkit::Tape;
using diffkit::Tensor;

ModelConfig ModelConfig::actor(int vocab, int embed, int hidden) {
  return {"actor", vocab, embed, hidden, hidden / 2, vocab, true};
}

ModelConfig ModelConfig::critic(int vocab, int embed, int hidden) {
  return {"critic", vocab, embed, hidden, hidden / 2, 4, true};
}

ModelConfig ModelConfig::test_critic(int vocab, int embed, int hidden) {
  return {"test_critic", vocab, embed, hidden, hidden / 2, 2, true};
}

ModelConfig ModelConfig::repair(int vocab, int embed, int hidden) {
  return {"repair", vocab, embed, hidden, hidden / 2, vocab, true};
}

Seq2Seq::Seq2Seq(ModelConfig config, std::uint64_t init_seed) : config_(config) {
  if (config_.vocab <= 0 || config_.head <= 0) {
    throw std::invalid_argument("model config must set vocab and head sizes");
  }
  const int e = config_.embed, h = config_.hidden, a = config_.attn;
  embed_ = params_.create("embed", {config_.vocab, e});
  enc_ = make_gru("enc", e);
  dec_ = make_gru("dec", e + h);
  attn_enc_ = params_.create("attn.enc", {h, a});
  attn_dec_ = params_.create("attn.dec", {h, a});
  attn_v_ = params_.create("attn.v", {a, 1});
  out_w_ = params_.create("out.weight", {h, config_.head});
  out_b_ = params_.create("out.bias", {1, config_.head});
  if (!config_.shared_heads) {
    pool_w_ = params_.create("pool.weight", {h, config_.head});
    pool_b_ = params_.create("pool.bias", {1, config_.head});
  }
  Rng rng(init_seed);
  params_.init_uniform(rng);
}

Seq2Seq::Gru Seq2Seq::make_gru(const std::string& prefix, int input_dim) {
  const int h = config_.hidden;
  Gru gru;
  gru.wz = params_.create(prefix + ".wz", {input_dim, h});
  gru.uz = params_.create(prefix + ".uz", {h, h});
  gru.bz = params_.create(prefix + ".bz", {1, h});
  gru.wr = params_.create(prefix + ".wr", {input_dim, h});
  gru.ur = params_.create(prefix + ".ur", {h, h});
  gru.br = params_.create(prefix + ".br", {1, h});
  gru.wh = params_.create(prefix + ".wh", {input_dim, h});
  gru.uh = params_.create(prefix + ".uh", {h, h});
  gru.bh = params_.create(prefix + ".bh", {1, h});
  return gru;
}

Tensor Seq2Seq::gru_step(const Gru& gru, const Tensor& input, const Tensor& state) const {
  using namespace diffkit;
  Tensor z = sigmoid(add(add(matmul(input, gru.wz), matmul(state, gru.uz)), gru.bz));
  Tensor r = sigmoid(add(add(matmul(input, gru.wr), matmul(state, gru.ur)), gru.br));
  Tensor candidate =
      diffkit::tanh(add(add(matmul(input, gru.wh), matmul(mul(r, state), gru.uh)), gru.bh));
  Tensor keep = Tensor::zeros({1, config_.hidden});
  keep.values() = 1.0;
  return add(mul(sub(keep, z), state), mul(z, candidate));
}

Seq2Seq::Encoded Seq2Seq::encode(std::span<const int> source) const {
  using namespace diffkit;
  if (source.empty()) throw std::invalid_argument("empty source sequence");
  Tensor state = Tensor::zeros({1, config_.hidden});
  std::vector<Tensor> states;
  states.reserve(source.size());
  for (int id : source) {
    const int ids[1] = {id};
    Tensor emb = embedding_gather(embed_, ids);
    state = gru_step(enc_, emb, state);
    states.push_back(state);
  }
  Encoded encoded;
  encoded.states = stack_rows(states);
  encoded.proj = matmul(encoded.states, attn_enc_);
  encoded.last = states.back();
  return encoded;
}

Tensor Seq2Seq::decoder_step(const Encoded& encoded, Tensor& state, int token) const {
  using namespace diffkit;
  const int ids[1] = {token};
  Tensor emb = embedding_gather(embed_, ids);
  // Additive attention, query = current decoder state.
  Tensor query = matmul(state, attn_dec_);
  Tensor energies = diffkit::tanh(row_broadcast_add(encoded.proj, query));
  Tensor scores = transpose(matmul(energies, attn_v_));
  Tensor alpha = diffkit::softmax(scores);
  Tensor context = matmul(alpha, encoded.states);
  Tensor gin = concat(emb, context);
  state = gru_step(dec_, gin, state);
  return head(state, /*pooled=*/false);
}

Tensor Seq2Seq::head(const Tensor& state, bool pooled) const {
  using namespace diffkit;
  if (pooled && !config_.shared_heads) {
    return add(matmul(state, pool_w_), pool_b_);
  }
  return add(matmul(state, out_w_), out_b_);
}

Seq2Seq::TeacherForced Seq2Seq::log_prob(std::span<const int> source,
                                         std::span<const int> target) const {
  using namespace diffkit;
  Encoded encoded = encode(source);
  Tensor state = encoded.last;
  TeacherForced result;
  const int bos = config_.bos, eos = config_.eos;
  result.token_nll.reserve(target.size() + 1);
  for (std::size_t t = 0; t <= target.size(); ++t) {
    const int input = t == 0 ? bos : target[t - 1];
    Tensor logits = decoder_step(encoded, state, input);
    const int expected = t == target.size() ? eos : target[t];
    Tensor nll = cross_entropy(logits, expected);
    result.token_logp.push_back(-nll.value());
    result.total_logp -= nll.value();
    result.token_nll.push_back(nll);
    result.total_nll = t == 0 ? nll : add(result.total_nll, nll);
  }
  return result;
}

Seq2Seq::Sampled Seq2Seq::sample(std::span<const int> source, double temperature,
                                 double top_p, int max_len, Rng& rng) const {
  return sample_with_prefix(source, {}, temperature, top_p, max_len, rng);
}

Seq2Seq::Sampled Seq2Seq::sample_with_prefix(std::span<const int> source,
                                             std::span<const int> prefix,
                                             double temperature, double top_p,
                                             int max_len, Rng& rng) const {
  Tape::NoGrad guard;
  Encoded encoded = encode(source);
  Tensor state = encoded.last;
  const int bos = config_.bos, eos = config_.eos;
  Sampled out;
  int previous = bos;
  for (int id : prefix) {
    Tensor logits = decoder_step(encoded, state, previous);
    diffkit::Array scaled = logits.values() / temperature;
    const double m = scaled.maxCoeff();
    const double lse = m + std::log((scaled - m).exp().sum());
    out.tokens.push_back(id);
    out.token_logp.push_back(scaled[id] - lse);
    previous = id;
  }
  while (static_cast<int>(out.tokens.size()) < max_len) {
    Tensor logits = decoder_step(encoded, state, previous);
    Drawn drawn = nucleus_sample(logits.values(), temperature, top_p, rng);
    if (drawn.token == eos) return out;
    out.tokens.push_back(drawn.token);
    out.token_logp.push_back(drawn.log_prob);
    previous = drawn.token;
  }
  out.hit_max_len = true;
  return out;
}

std::vector<int> Seq2Seq::greedy(std::span<const int> source, int max_len) const {
  Tape::NoGrad guard;
  Encoded encoded = encode(source);
  Tensor state = encoded.last;
  const int bos = config_.bos, eos = config_.eos;
  std::vector<int> tokens;
  int previous = bos;
  while (static_cast<int>(tokens.size()) < max_len) {
    Tensor logits = decoder_step(encoded, state, previous);
    const int token = argmax(logits.values());
    if (token == eos) break;
    tokens.push_back(token);
    previous = token;
  }
  return tokens;
}

Seq2Seq::CriticOutput Seq2Seq::critic_forward(std::span<const int> source,
                                              std::span<const int> program) const {
  using namespace diffkit;
  if (program.empty()) throw std::invalid_argument("critic_forward: empty program");
  Encoded encoded = encode(source);
  Tensor state = encoded.last;
  CriticOutput out;
  std::vector<Tensor> states;
  states.reserve(program.size());
  for (int token : program) {
    out.token_logits.push_back(decoder_step(encoded, state, token));
    states.push_back(state);
  }
  Tensor pooled = reshape(max_pool_over_time(stack_rows(states)), {1, config_.hidden});
  out.pooled_logits = head(pooled, /*pooled=*/true);
  return out;
}

std::vector<double> Seq2Seq::prefix_pass_values(std::span<const int> source,
                                                std::span<const int> program) const {
  if (config_.head != 2) throw std::logic_error("prefix_pass_values needs a binary head");
  Tape::NoGrad guard;
  CriticOutput out = critic_forward(source, program);
  std::vector<double> values;
  values.reserve(out.token_logits.size());
  for (const Tensor& logits : out.token_logits) {
    values.push_back(softmax_values(logits)[1]);
  }
  return values;
}

nlohmann::json Seq2Seq::metadata() const {
  return nlohmann::json{{"role", config_.role},     {"vocab", config_.vocab},
                        {"embed", config_.embed},   {"hidden", config_.hidden},
                        {"attn", config_.attn},     {"head", config_.head},
                        {"shared_heads", config_.shared_heads}};
}

void Seq2Seq::save(const std::string& path, const nlohmann::json& extra) const {
  nlohmann::json meta = metadata();
  for (auto it = extra.begin(); it != extra.end(); ++it) meta[it.key()] = it.value();
  diffkit::save_checkpoint(path, params_, meta);
}

Seq2Seq Seq2Seq::from_checkpoint(const diffkit::Checkpoint& checkpoint) {
  const nlohmann::json& meta = checkpoint.metadata;
  ModelConfig config;
  config.role = meta.at("role").get<std::string>();
  config.vocab = meta.at("vocab").get<int>();
  config.embed = meta.at("embed").get<int>();
  config.hidden = meta.at("hidden").get<int>();
  config.attn = meta.at("attn").get<int>();
  config.head = meta.at("head").get<int>();
  config.shared_heads = meta.at("shared_heads").get<bool>();
  Seq2Seq model(config, /*init_seed=*/0);
  diffkit::restore_parameters(model.params_, checkpoint);
  return model;
}

Seq2Seq Seq2Seq::clone() const {
  Seq2Seq copy(config_, /*init_seed=*/0);
  for (std::size_t e = 0; e < params_.entries().size(); ++e) {
    copy.params_.entries()[e].tensor.values() = params_.entries()[e].tensor.values();
  }
  return copy;
}

std::vector<double> softmax_values(const Tensor& logits) {
  const diffkit::Array& x = logits.values();
  const double m = x.maxCoeff();
  diffkit::Array p = (x - m).exp();
  p /= p.sum();
  return std::vector<double>(p.data(), p.data() + p.size());
}

}  // namespace synthrl::models
