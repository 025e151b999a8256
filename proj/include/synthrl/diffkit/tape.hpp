#pragma once

#include <functional>
#include <stdexcept>
#include <vector>

#include "synthrl/diffkit/tensor.hpp"

namespace synthrl::diffkit {

// Records executed operations in order; backward() replays the records in
// exact reverse, accumulating (+=) gradients into every tensor on a path
// from the loss, then clears the tape. Constructing a Tape makes it the
// active tape for the current thread; ops executed while no tape is active
// record nothing (inference mode). A tape and its tensors belong to one
// thread.
class Tape {
 public:
  Tape() : parent_(active_) { active_ = this; }
  ~Tape() { active_ = parent_; }

  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  static Tape* active() { return active_; }

  // Suspends recording for the current scope (inference-mode forward).
  class NoGrad {
   public:
    NoGrad() : saved_(active_) { active_ = nullptr; }
    ~NoGrad() { active_ = saved_; }
    NoGrad(const NoGrad&) = delete;
    NoGrad& operator=(const NoGrad&) = delete;

   private:
    Tape* saved_;
  };

  void record(std::function<void()> backward_step) {
    nodes_.push_back(std::move(backward_step));
  }

  std::size_t size() const { return nodes_.size(); }

  void backward(Tensor loss) {
    if (spent_) throw std::logic_error("backward called twice on a cleared tape");
    if (nodes_.empty()) throw std::logic_error("backward on an empty tape");
    if (loss.size() != 1) throw std::invalid_argument("loss must be a scalar");
    loss.grad()[0] += 1.0;
    for (auto it = nodes_.rbegin(); it != nodes_.rend(); ++it) (*it)();
    nodes_.clear();
    spent_ = true;
  }

 private:
  static thread_local Tape* active_;

  std::vector<std::function<void()>> nodes_;
  Tape* parent_ = nullptr;
  bool spent_ = false;
};

}  // namespace synthrl::diffkit
