#include "synthrl/diffkit/ops.hpp"

#include <cmath>
#include <stdexcept>

namespace synthrl::diffkit {

thread_local Tape* Tape::active_ = nullptr;

namespace {

bool on_grad_path(const Tensor& t) { return t.tracked(); }

Tape* recording_tape(std::initializer_list<const Tensor*> inputs) {
  Tape* tape = Tape::active();
  if (tape == nullptr) return nullptr;
  for (const Tensor* t : inputs) {
    if (on_grad_path(*t)) return tape;
  }
  return nullptr;
}

void require(bool cond, const char* what) {
  if (!cond) throw std::invalid_argument(what);
}

void require_same_shape(const Tensor& a, const Tensor& b) {
  require(a.shape() == b.shape(), "shape mismatch");
}

// Stable per-row softmax written into out (flat, row-major).
void softmax_rows(const Tensor& in, Array& out) {
  const int r = in.rows(), c = in.cols();
  const Array& x = in.values();
  for (int i = 0; i < r; ++i) {
    const auto row = x.segment(static_cast<Eigen::Index>(i) * c, c);
    const double m = row.maxCoeff();
    auto out_row = out.segment(static_cast<Eigen::Index>(i) * c, c);
    out_row = (row - m).exp();
    out_row /= out_row.sum();
  }
}

}  // namespace

Tensor matmul(const Tensor& a, const Tensor& b) {
  require(a.ndim() == 2 && b.ndim() == 2, "matmul expects 2-D tensors");
  require(a.cols() == b.rows(), "matmul inner dimensions differ");
  Tensor out = Tensor::zeros({a.rows(), b.cols()});
  out.matrix().noalias() = a.matrix() * b.matrix();
  if (Tape* tape = recording_tape({&a, &b})) {
    out.mark_tracked();
    tape->record([a = a, b = b, out = out]() mutable {
      if (!out.has_grad()) return;
      const auto g = out.grad_matrix();
      if (on_grad_path(a)) a.grad_matrix().noalias() += g * b.matrix().transpose();
      if (on_grad_path(b)) b.grad_matrix().noalias() += a.matrix().transpose() * g;
    });
  }
  return out;
}

Tensor add(const Tensor& a, const Tensor& b) {
  require_same_shape(a, b);
  Tensor out = Tensor::zeros(a.shape());
  out.values() = a.values() + b.values();
  if (Tape* tape = recording_tape({&a, &b})) {
    out.mark_tracked();
    tape->record([a = a, b = b, out = out]() mutable {
      if (!out.has_grad()) return;
      if (on_grad_path(a)) a.grad() += out.grad();
      if (on_grad_path(b)) b.grad() += out.grad();
    });
  }
  return out;
}

Tensor sub(const Tensor& a, const Tensor& b) {
  require_same_shape(a, b);
  Tensor out = Tensor::zeros(a.shape());
  out.values() = a.values() - b.values();
  if (Tape* tape = recording_tape({&a, &b})) {
    out.mark_tracked();
    tape->record([a = a, b = b, out = out]() mutable {
      if (!out.has_grad()) return;
      if (on_grad_path(a)) a.grad() += out.grad();
      if (on_grad_path(b)) b.grad() -= out.grad();
    });
  }
  return out;
}

Tensor mul(const Tensor& a, const Tensor& b) {
  require_same_shape(a, b);
  Tensor out = Tensor::zeros(a.shape());
  out.values() = a.values() * b.values();
  if (Tape* tape = recording_tape({&a, &b})) {
    out.mark_tracked();
    tape->record([a = a, b = b, out = out]() mutable {
      if (!out.has_grad()) return;
      if (on_grad_path(a)) a.grad() += out.grad() * b.values();
      if (on_grad_path(b)) b.grad() += out.grad() * a.values();
    });
  }
  return out;
}

Tensor scale(const Tensor& a, double factor) {
  Tensor out = Tensor::zeros(a.shape());
  out.values() = a.values() * factor;
  if (Tape* tape = recording_tape({&a})) {
    out.mark_tracked();
    tape->record([a = a, out = out, factor]() mutable {
      if (!out.has_grad()) return;
      a.grad() += out.grad() * factor;
    });
  }
  return out;
}

Tensor tanh(const Tensor& a) {
  Tensor out = Tensor::zeros(a.shape());
  out.values() = a.values().tanh();
  if (Tape* tape = recording_tape({&a})) {
    out.mark_tracked();
    tape->record([a = a, out = out]() mutable {
      if (!out.has_grad()) return;
      a.grad() += out.grad() * (1.0 - out.values().square());
    });
  }
  return out;
}

Tensor sigmoid(const Tensor& a) {
  Tensor out = Tensor::zeros(a.shape());
  out.values() = 0.5 * (0.5 * a.values()).tanh() + 0.5;  // stable logistic
  if (Tape* tape = recording_tape({&a})) {
    out.mark_tracked();
    tape->record([a = a, out = out]() mutable {
      if (!out.has_grad()) return;
      a.grad() += out.grad() * out.values() * (1.0 - out.values());
    });
  }
  return out;
}

Tensor softmax(const Tensor& a) {
  require(a.ndim() <= 2, "softmax expects a 1-D or 2-D tensor");
  require(a.values().isFinite().all(), "softmax input must be finite");
  Tensor out = Tensor::zeros(a.shape());
  softmax_rows(a, out.values());
  if (Tape* tape = recording_tape({&a})) {
    out.mark_tracked();
    tape->record([a = a, out = out]() mutable {
      if (!out.has_grad()) return;
      const int r = out.rows(), c = out.cols();
      for (int i = 0; i < r; ++i) {
        const auto y = out.values().segment(static_cast<Eigen::Index>(i) * c, c);
        const auto g = out.grad().segment(static_cast<Eigen::Index>(i) * c, c);
        const double dot = (g * y).sum();
        a.grad().segment(static_cast<Eigen::Index>(i) * c, c) += y * (g - dot);
      }
    });
  }
  return out;
}

Tensor log_softmax(const Tensor& a) {
  require(a.ndim() <= 2, "log_softmax expects a 1-D or 2-D tensor");
  require(a.values().isFinite().all(), "log_softmax input must be finite");
  Tensor out = Tensor::zeros(a.shape());
  const int r = a.rows(), c = a.cols();
  for (int i = 0; i < r; ++i) {
    const auto row = a.values().segment(static_cast<Eigen::Index>(i) * c, c);
    const double m = row.maxCoeff();
    const double lse = m + std::log((row - m).exp().sum());
    out.values().segment(static_cast<Eigen::Index>(i) * c, c) = row - lse;
  }
  if (Tape* tape = recording_tape({&a})) {
    out.mark_tracked();
    tape->record([a = a, out = out]() mutable {
      if (!out.has_grad()) return;
      const int rr = out.rows(), cc = out.cols();
      for (int i = 0; i < rr; ++i) {
        const auto y = out.values().segment(static_cast<Eigen::Index>(i) * cc, cc);
        const auto g = out.grad().segment(static_cast<Eigen::Index>(i) * cc, cc);
        a.grad().segment(static_cast<Eigen::Index>(i) * cc, cc) += g - y.exp() * g.sum();
      }
    });
  }
  return out;
}

Tensor cross_entropy(const Tensor& logits, int target) {
  require(logits.rows() == 1, "cross_entropy expects a single row of logits");
  require(target >= 0 && target < logits.cols(), "cross_entropy target out of range");
  const auto& x = logits.values();
  const double m = x.maxCoeff();
  const double lse = m + std::log((x - m).exp().sum());
  Tensor out = Tensor::scalar(lse - x[target]);
  if (Tape* tape = recording_tape({&logits})) {
    out.mark_tracked();
    tape->record([logits = logits, out = out, target]() mutable {
      if (!out.has_grad()) return;
      const double g = out.grad()[0];
      const auto& xv = logits.values();
      const double mm = xv.maxCoeff();
      Array probs = (xv - mm).exp();
      probs /= probs.sum();
      probs[target] -= 1.0;
      logits.grad() += g * probs;
    });
  }
  return out;
}

Tensor embedding_gather(const Tensor& table, std::span<const int> ids) {
  require(table.ndim() == 2, "embedding table must be 2-D");
  require(!ids.empty(), "embedding_gather needs at least one id");
  const int width = table.cols();
  for (int id : ids) require(id >= 0 && id < table.rows(), "embedding id out of range");
  Tensor out = Tensor::zeros({static_cast<int>(ids.size()), width});
  for (std::size_t i = 0; i < ids.size(); ++i) {
    out.values().segment(static_cast<Eigen::Index>(i) * width, width) =
        table.values().segment(static_cast<Eigen::Index>(ids[i]) * width, width);
  }
  if (Tape* tape = recording_tape({&table})) {
    out.mark_tracked();
    tape->record([table = table, out = out, ids = std::vector<int>(ids.begin(), ids.end())]() mutable {
      if (!out.has_grad()) return;
      const int w = table.cols();
      for (std::size_t i = 0; i < ids.size(); ++i) {
        table.grad().segment(static_cast<Eigen::Index>(ids[i]) * w, w) +=
            out.grad().segment(static_cast<Eigen::Index>(i) * w, w);
      }
    });
  }
  return out;
}

Tensor concat(const Tensor& a, const Tensor& b) {
  require(a.rows() == b.rows(), "concat row counts differ");
  const int r = a.rows(), ca = a.cols(), cb = b.cols();
  const bool one_dim = a.ndim() == 1 && b.ndim() == 1;
  Tensor out = one_dim ? Tensor::zeros({ca + cb}) : Tensor::zeros({r, ca + cb});
  for (int i = 0; i < r; ++i) {
    out.values().segment(static_cast<Eigen::Index>(i) * (ca + cb), ca) =
        a.values().segment(static_cast<Eigen::Index>(i) * ca, ca);
    out.values().segment(static_cast<Eigen::Index>(i) * (ca + cb) + ca, cb) =
        b.values().segment(static_cast<Eigen::Index>(i) * cb, cb);
  }
  if (Tape* tape = recording_tape({&a, &b})) {
    out.mark_tracked();
    tape->record([a = a, b = b, out = out]() mutable {
      if (!out.has_grad()) return;
      const int rr = a.rows(), cca = a.cols(), ccb = b.cols();
      for (int i = 0; i < rr; ++i) {
        if (on_grad_path(a)) {
          a.grad().segment(static_cast<Eigen::Index>(i) * cca, cca) +=
              out.grad().segment(static_cast<Eigen::Index>(i) * (cca + ccb), cca);
        }
        if (on_grad_path(b)) {
          b.grad().segment(static_cast<Eigen::Index>(i) * ccb, ccb) +=
              out.grad().segment(static_cast<Eigen::Index>(i) * (cca + ccb) + cca, ccb);
        }
      }
    });
  }
  return out;
}

Tensor stack_rows(std::span<const Tensor> rows) {
  require(!rows.empty(), "stack_rows needs at least one row");
  const int width = rows.front().cols();
  for (const Tensor& r : rows) {
    require(r.rows() == 1, "stack_rows expects single-row tensors");
    require(r.cols() == width, "stack_rows widths differ");
  }
  Tensor out = Tensor::zeros({static_cast<int>(rows.size()), width});
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out.values().segment(static_cast<Eigen::Index>(i) * width, width) = rows[i].values();
  }
  bool any = false;
  for (const Tensor& r : rows) any = any || on_grad_path(r);
  if (Tape* tape = Tape::active(); tape != nullptr && any) {
    out.mark_tracked();
    tape->record([rows = std::vector<Tensor>(rows.begin(), rows.end()), out = out]() mutable {
      if (!out.has_grad()) return;
      const int w = out.cols();
      for (std::size_t i = 0; i < rows.size(); ++i) {
        if (on_grad_path(rows[i])) {
          rows[i].grad() += out.grad().segment(static_cast<Eigen::Index>(i) * w, w);
        }
      }
    });
  }
  return out;
}

Tensor transpose(const Tensor& a) {
  require(a.ndim() == 2, "transpose expects a 2-D tensor");
  Tensor out = Tensor::zeros({a.cols(), a.rows()});
  out.matrix() = a.matrix().transpose();
  if (Tape* tape = recording_tape({&a})) {
    out.mark_tracked();
    tape->record([a = a, out = out]() mutable {
      if (!out.has_grad()) return;
      a.grad_matrix() += out.grad_matrix().transpose();
    });
  }
  return out;
}

Tensor reshape(const Tensor& a, std::vector<int> shape) {
  Tensor out = Tensor::zeros(std::move(shape));
  require(out.size() == a.size(), "reshape changes element count");
  out.values() = a.values();
  if (Tape* tape = recording_tape({&a})) {
    out.mark_tracked();
    tape->record([a = a, out = out]() mutable {
      if (!out.has_grad()) return;
      a.grad() += out.grad();
    });
  }
  return out;
}

Tensor row_broadcast_add(const Tensor& a, const Tensor& row) {
  require(a.ndim() == 2, "row_broadcast_add expects a 2-D left operand");
  require(row.rows() == 1 && row.cols() == a.cols(), "broadcast row width mismatch");
  Tensor out = Tensor::zeros(a.shape());
  const int r = a.rows(), c = a.cols();
  for (int i = 0; i < r; ++i) {
    out.values().segment(static_cast<Eigen::Index>(i) * c, c) =
        a.values().segment(static_cast<Eigen::Index>(i) * c, c) + row.values();
  }
  if (Tape* tape = recording_tape({&a, &row})) {
    out.mark_tracked();
    tape->record([a = a, row = row, out = out]() mutable {
      if (!out.has_grad()) return;
      if (on_grad_path(a)) a.grad() += out.grad();
      if (on_grad_path(row)) {
        const int rr = a.rows(), cc = a.cols();
        for (int i = 0; i < rr; ++i) {
          row.grad() += out.grad().segment(static_cast<Eigen::Index>(i) * cc, cc);
        }
      }
    });
  }
  return out;
}

Tensor max_pool_over_time(const Tensor& a) {
  require(a.ndim() == 2, "max_pool_over_time expects a (T x H) tensor");
  const int t_len = a.rows(), width = a.cols();
  Tensor out = Tensor::zeros({width});
  std::vector<int> argmax(width, 0);
  for (int j = 0; j < width; ++j) {
    double best = a.values()[j];
    int best_t = 0;
    for (int t = 1; t < t_len; ++t) {
      const double v = a.values()[static_cast<Eigen::Index>(t) * width + j];
      if (v > best) {  // strict: ties keep the earlier timestep
        best = v;
        best_t = t;
      }
    }
    out.values()[j] = best;
    argmax[j] = best_t;
  }
  if (Tape* tape = recording_tape({&a})) {
    out.mark_tracked();
    tape->record([a = a, out = out, argmax = std::move(argmax)]() mutable {
      if (!out.has_grad()) return;
      const int w = a.cols();
      for (int j = 0; j < w; ++j) {
        a.grad()[static_cast<Eigen::Index>(argmax[j]) * w + j] += out.grad()[j];
      }
    });
  }
  return out;
}

Tensor sum(const Tensor& a) {
  Tensor out = Tensor::scalar(a.values().sum());
  if (Tape* tape = recording_tape({&a})) {
    out.mark_tracked();
    tape->record([a = a, out = out]() mutable {
      if (!out.has_grad()) return;
      a.grad() += out.grad()[0];
    });
  }
  return out;
}

}  // namespace synthrl::diffkit
