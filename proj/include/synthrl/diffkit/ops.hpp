#pragma once

#include <span>
#include <vector>

#include "synthrl/diffkit/tape.hpp"
#include "synthrl/diffkit/tensor.hpp"

namespace synthrl::diffkit {

// Forward operations. Each checks shapes, computes its value, and — when a
// tape is active and any input is on a gradient path — records its backward
// rule. All take and return handles; none mutates an input.

Tensor matmul(const Tensor& a, const Tensor& b);
Tensor add(const Tensor& a, const Tensor& b);
Tensor sub(const Tensor& a, const Tensor& b);
Tensor mul(const Tensor& a, const Tensor& b);      // elementwise
Tensor scale(const Tensor& a, double factor);
Tensor tanh(const Tensor& a);
Tensor sigmoid(const Tensor& a);

// Last-axis softmax family; rows are treated independently.
Tensor softmax(const Tensor& a);
Tensor log_softmax(const Tensor& a);

// -log_softmax(logits)[target]; logits must be a single row.
Tensor cross_entropy(const Tensor& logits, int target);

// Rows of `table` selected by ids; gradient scatters back into the table.
Tensor embedding_gather(const Tensor& table, std::span<const int> ids);

// Last-axis concatenation of two row-compatible tensors.
Tensor concat(const Tensor& a, const Tensor& b);

// Stacks T single-row tensors of width H into a (T x H) tensor.
Tensor stack_rows(std::span<const Tensor> rows);

Tensor transpose(const Tensor& a);
Tensor reshape(const Tensor& a, std::vector<int> shape);

// (T x H) + broadcast single row (H).
Tensor row_broadcast_add(const Tensor& a, const Tensor& row);

// (T x H) -> (H) columnwise maxima; gradient routes only to the argmax
// positions, ties toward the smaller time index.
Tensor max_pool_over_time(const Tensor& a);

Tensor sum(const Tensor& a);

}  // namespace synthrl::diffkit
