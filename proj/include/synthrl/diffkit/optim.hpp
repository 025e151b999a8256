#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "synthrl/diffkit/tensor.hpp"
#include "synthrl/rng.hpp"

namespace synthrl::diffkit {

// Named trainable tensors plus their optimizer state. Names are unique and
// shapes immutable after creation; iteration order is insertion order.
class ParameterStore {
 public:
  Tensor& create(const std::string& name, std::vector<int> shape) {
    Tensor t = Tensor::zeros(std::move(shape), /*requires_grad=*/true);
    return add(name, t);
  }

  Tensor& add(const std::string& name, Tensor t) {
    if (index_.count(name) > 0) throw std::logic_error("duplicate parameter name: " + name);
    index_.emplace(name, entries_.size());
    entries_.push_back({name, std::move(t), {}, {}});
    return entries_.back().tensor;
  }

  Tensor& get(const std::string& name) {
    auto it = index_.find(name);
    if (it == index_.end()) throw std::out_of_range("unknown parameter: " + name);
    return entries_[it->second].tensor;
  }
  const Tensor& get(const std::string& name) const {
    return const_cast<ParameterStore*>(this)->get(name);
  }

  struct Entry {
    std::string name;
    Tensor tensor;
    Array m;  // first-moment estimate, empty until the first step
    Array v;  // second-moment estimate
  };

  std::vector<Entry>& entries() { return entries_; }
  const std::vector<Entry>& entries() const { return entries_; }

  std::size_t size() const { return entries_.size(); }

  Eigen::Index parameter_count() const {
    Eigen::Index n = 0;
    for (const Entry& e : entries_) n += e.tensor.size();
    return n;
  }

  bool any_grad() const {
    for (const Entry& e : entries_) {
      if (e.tensor.has_grad()) return true;
    }
    return false;
  }

  void drop_grads() {
    for (Entry& e : entries_) e.tensor.drop_grad();
  }

  std::int64_t step_count() const { return step_count_; }
  std::int64_t& step_count() { return step_count_; }

  // Fills every parameter with U(-0.08, 0.08), except names ending in the
  // given suffix which are zeroed (the output projection bias).
  void init_uniform(Rng& rng, double half_range = 0.08,
                    const std::string& zero_suffix = "out.bias");

 private:
  std::vector<Entry> entries_;
  std::unordered_map<std::string, std::size_t> index_;
  std::int64_t step_count_ = 0;
};

// One adaptive-moment update with bias correction; gradients are cleared
// afterwards. Throws when no gradient has been populated since the last
// step.
void adam_step(ParameterStore& store, double lr, double beta1 = 0.9,
               double beta2 = 0.999, double eps = 1e-8);

}  // namespace synthrl::diffkit
