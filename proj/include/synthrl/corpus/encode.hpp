#pragma once

#include <utility>
#include <vector>

#include "synthrl/corpus/problem.hpp"
#include "synthrl/corpus/vocabulary.hpp"

namespace synthrl::corpus {

inline constexpr int kMaxSourceLen = 64;   // BOS + description + EOS
inline constexpr int kMaxTargetLen = 96;   // BOS + program + EOS
inline constexpr int kMaxRepairLen = 192;  // composite repair input

struct EncodedPair {
  std::vector<int> source;  // BOS description EOS
  std::vector<int> target;  // BOS ground_truth EOS
};

// Throws on unknown tokens or over-length sequences; never truncates.
EncodedPair encode(const Vocabulary& vocab, const ProblemSpec& problem);

std::vector<int> encode_source(const Vocabulary& vocab,
                               std::span<const std::string> description);

}  // namespace synthrl::corpus
