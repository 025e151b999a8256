#include "synthrl/corpus/encode.hpp"

#include <stdexcept>

namespace synthrl::corpus {

namespace {

std::vector<int> with_specials(const Vocabulary& vocab, std::vector<int> ids,
                               int max_len, const char* what) {
  std::vector<int> out;
  out.reserve(ids.size() + 2);
  out.push_back(vocab.bos());
  out.insert(out.end(), ids.begin(), ids.end());
  out.push_back(vocab.eos());
  if (static_cast<int>(out.size()) > max_len) {
    throw std::length_error(std::string(what) + " sequence exceeds maximum length");
  }
  return out;
}

}  // namespace

std::vector<int> encode_source(const Vocabulary& vocab,
                               std::span<const std::string> description) {
  return with_specials(vocab, vocab.ids_of(description), kMaxSourceLen, "source");
}

EncodedPair encode(const Vocabulary& vocab, const ProblemSpec& problem) {
  EncodedPair pair;
  pair.source = encode_source(vocab, problem.description);
  pair.target = with_specials(vocab, vocab.ids_of_program(problem.ground_truth),
                              kMaxTargetLen, "target");
  return pair;
}

}  // namespace synthrl::corpus
