#include "synthrl/models/repair_input.hpp"

#include <stdexcept>

namespace synthrl::models {

std::vector<int> repair_input(const corpus::Vocabulary& vocab,
                              std::span<const int> description_ids,
                              std::span<const int> failing_program_ids,
                              minilang::Outcome outcome,
                              minilang::ErrorSubtype subtype) {
  std::vector<int> ids;
  ids.reserve(description_ids.size() + failing_program_ids.size() + 6);
  ids.push_back(vocab.bos());
  ids.insert(ids.end(), description_ids.begin(), description_ids.end());
  ids.push_back(vocab.sep());
  ids.insert(ids.end(), failing_program_ids.begin(), failing_program_ids.end());
  ids.push_back(vocab.sep());
  ids.push_back(vocab.outcome_token(outcome));
  ids.push_back(vocab.subtype_token(subtype));
  ids.push_back(vocab.eos());
  if (static_cast<int>(ids.size()) > corpus::kMaxRepairLen) {
    throw std::length_error("repair input exceeds maximum length");
  }
  return ids;
}

}  // namespace synthrl::models
