#pragma once

#include <string>
#include <vector>

#include "json.hpp"
#include "synthrl/diffkit/optim.hpp"

namespace synthrl::diffkit {

struct CheckpointError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct CheckpointRecord {
  std::string name;
  std::vector<int> shape;
  std::vector<double> values;  // row-major
};

struct Checkpoint {
  nlohmann::json metadata;
  std::vector<CheckpointRecord> records;
};

// Versioned binary container: metadata JSON plus (name, shape, values)
// records. Values round-trip byte-exactly.
void save_checkpoint(const std::string& path, const ParameterStore& store,
                     const nlohmann::json& metadata);

Checkpoint load_checkpoint(const std::string& path);

// Copies record values into same-named, same-shaped parameters; throws on
// any mismatch or missing record.
void restore_parameters(ParameterStore& store, const Checkpoint& checkpoint);

}  // namespace synthrl::diffkit
