#include "synthrl/diffkit/optim.hpp"

#include <cmath>

namespace synthrl::diffkit {

void ParameterStore::init_uniform(Rng& rng, double half_range,
                                  const std::string& zero_suffix) {
  for (Entry& e : entries_) {
    const bool zero = e.name.size() >= zero_suffix.size() &&
                      e.name.compare(e.name.size() - zero_suffix.size(),
                                     zero_suffix.size(), zero_suffix) == 0;
    for (Eigen::Index i = 0; i < e.tensor.size(); ++i) {
      e.tensor.values()[i] = zero ? 0.0 : rng.uniform(-half_range, half_range);
    }
  }
}

void adam_step(ParameterStore& store, double lr, double beta1, double beta2,
               double eps) {
  if (!store.any_grad()) throw std::logic_error("adam_step before any backward");
  const std::int64_t t = ++store.step_count();
  const double bias1 = 1.0 - std::pow(beta1, static_cast<double>(t));
  const double bias2 = 1.0 - std::pow(beta2, static_cast<double>(t));
  for (ParameterStore::Entry& e : store.entries()) {
    if (e.m.size() == 0) {
      e.m = Array::Zero(e.tensor.size());
      e.v = Array::Zero(e.tensor.size());
    }
    // Parameters not touched this step keep decaying moments with g = 0.
    if (e.tensor.has_grad()) {
      const Array& g = e.tensor.grad();
      e.m = beta1 * e.m + (1.0 - beta1) * g;
      e.v = beta2 * e.v + (1.0 - beta2) * g.square();
    } else {
      e.m *= beta1;
      e.v *= beta2;
    }
    e.tensor.values() -= lr * (e.m / bias1) / ((e.v / bias2).sqrt() + eps);
    e.tensor.drop_grad();
  }
}

}  // namespace synthrl::diffkit
