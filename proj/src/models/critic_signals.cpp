#include "synthrl/models/critic_signals.hpp"

namespace synthrl::models {

std::vector<double> token_values(const Seq2Seq::CriticOutput& critic_out,
                                 minilang::Outcome outcome) {
  const int index = static_cast<int>(outcome);
  std::vector<double> values;
  values.reserve(critic_out.token_logits.size());
  for (const diffkit::Tensor& logits : critic_out.token_logits) {
    values.push_back(softmax_values(logits)[index]);
  }
  return values;
}

std::vector<double> sequence_outcome_probs(const Seq2Seq::CriticOutput& critic_out) {
  return softmax_values(critic_out.pooled_logits);
}

}  // namespace synthrl::models
