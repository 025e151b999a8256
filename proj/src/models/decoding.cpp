#include "synthrl/models/decoding.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace synthrl::models {

using diffkit::Array;

Drawn nucleus_sample(const Array& logits, double temperature, double top_p, Rng& rng) {
  if (temperature <= 0.0) throw std::invalid_argument("temperature must be positive");
  if (top_p <= 0.0 || top_p > 1.0) throw std::invalid_argument("top_p must be in (0, 1]");

  const Eigen::Index n = logits.size();
  Array scaled = logits / temperature;
  const double m = scaled.maxCoeff();
  const double lse = m + std::log((scaled - m).exp().sum());
  Array log_probs = scaled - lse;
  Array probs = log_probs.exp();

  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int i, int j) {
    if (probs[i] != probs[j]) return probs[i] > probs[j];
    return i < j;
  });

  // Smallest prefix whose mass reaches top_p. The slack absorbs rounding in
  // the cumulative sum so boundary cases match exact arithmetic.
  Eigen::Index k = n;
  double mass = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    mass += probs[order[static_cast<std::size_t>(i)]];
    if (mass >= top_p - 1e-12) {
      k = i + 1;
      break;
    }
  }

  double nucleus_mass = 0.0;
  for (Eigen::Index i = 0; i < k; ++i) nucleus_mass += probs[order[static_cast<std::size_t>(i)]];

  const double u = rng.next_double() * nucleus_mass;
  double cum = 0.0;
  int token = order[static_cast<std::size_t>(k - 1)];
  for (Eigen::Index i = 0; i < k; ++i) {
    cum += probs[order[static_cast<std::size_t>(i)]];
    if (u < cum) {
      token = order[static_cast<std::size_t>(i)];
      break;
    }
  }
  return Drawn{token, log_probs[token]};
}

int argmax(const Array& values) {
  int best = 0;
  for (Eigen::Index i = 1; i < values.size(); ++i) {
    if (values[i] > values[best]) best = static_cast<int>(i);
  }
  return best;
}

}  // namespace synthrl::models
