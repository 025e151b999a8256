#pragma once

#include <vector>

#include "synthrl/minilang/outcome.hpp"
#include "synthrl/models/seq2seq.hpp"

namespace synthrl::models {

// Token-level values: the critic's per-token probability of the program's
// actual test outcome, q_t = v_t[u]. Plain values; no gradient flows
// through them.
std::vector<double> token_values(const Seq2Seq::CriticOutput& critic_out,
                                 minilang::Outcome outcome);

// Sequence-level outcome distribution from the pooled head.
std::vector<double> sequence_outcome_probs(const Seq2Seq::CriticOutput& critic_out);

}  // namespace synthrl::models
