#pragma once

#include <fstream>
#include <string>

#include "json.hpp"

namespace synthrl::training {

// Line-delimited JSON metrics appender. Every line carries the stage, the
// seed and the config hash so a log is attributable to one run.
class MetricsLog {
 public:
  MetricsLog() = default;

  MetricsLog(std::string path, std::string config_hash, std::uint64_t seed)
      : path_(std::move(path)), config_hash_(std::move(config_hash)), seed_(seed) {}

  void append(const std::string& stage, int epoch, nlohmann::json fields) {
    if (path_.empty()) return;
    fields["stage"] = stage;
    fields["epoch"] = epoch;
    fields["seed"] = seed_;
    fields["config_hash"] = config_hash_;
    std::ofstream out(path_, std::ios::binary | std::ios::app);
    out << fields.dump() << '\n';
  }

 private:
  std::string path_;
  std::string config_hash_;
  std::uint64_t seed_ = 0;
};

}  // namespace synthrl::training
