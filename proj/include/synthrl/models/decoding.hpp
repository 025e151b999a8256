#pragma once

#include "synthrl/diffkit/tensor.hpp"
#include "synthrl/rng.hpp"

namespace synthrl::models {

struct Drawn {
  int token = 0;
  double log_prob = 0.0;  // under the untruncated temperature-scaled distribution
};

// Nucleus sampling: softmax(logits / temperature), restricted to the
// smallest prefix of the probability-sorted distribution whose mass reaches
// top_p, renormalized. The returned log-probability is taken from the full
// (untruncated) temperature-scaled distribution.
Drawn nucleus_sample(const diffkit::Array& logits, double temperature, double top_p,
                     Rng& rng);

// Ties resolve toward the smaller index.
int argmax(const diffkit::Array& values);

}  // namespace synthrl::models
