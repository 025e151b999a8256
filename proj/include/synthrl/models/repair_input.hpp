#pragma once

#include <span>
#include <vector>

#include "synthrl/corpus/encode.hpp"
#include "synthrl/corpus/vocabulary.hpp"
#include "synthrl/minilang/outcome.hpp"

namespace synthrl::models {

// Composite input of the repair model:
//   BOS description SEP failing-program SEP outcome-tag subtype-tag EOS
// The ids are raw (no specials) on input. Throws on over-length.
std::vector<int> repair_input(const corpus::Vocabulary& vocab,
                              std::span<const int> description_ids,
                              std::span<const int> failing_program_ids,
                              minilang::Outcome outcome,
                              minilang::ErrorSubtype subtype);

}  // namespace synthrl::models
