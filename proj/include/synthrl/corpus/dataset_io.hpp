#pragma once

#include <stdexcept>
#include <string>

#include "synthrl/corpus/problem.hpp"

namespace synthrl::corpus {

struct DatasetError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// JSON Lines, UTF-8, LF line endings. A header line carries the generator
// seed and split; each subsequent line is one problem. load(save(d)) == d.
void save_dataset(const Dataset& dataset, const std::string& path);

// Throws DatasetError with the line number for malformed lines, and when a
// loaded ground truth fails its own tests or ids collide.
Dataset load_dataset(const std::string& path);

}  // namespace synthrl::corpus
