#include "synthrl/diffkit/checkpoint.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>

namespace synthrl::diffkit {

namespace {

constexpr char kMagic[8] = {'S', 'R', 'L', 'C', 'K', 'P', 'T', '1'};

void write_u32(std::ofstream& out, std::uint32_t v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(v));
}

std::uint32_t read_u32(std::ifstream& in) {
  std::uint32_t v = 0;
  in.read(reinterpret_cast<char*>(&v), sizeof(v));
  return v;
}

}  // namespace

void save_checkpoint(const std::string& path, const ParameterStore& store,
                     const nlohmann::json& metadata) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw CheckpointError("cannot open checkpoint for writing: " + path);

  out.write(kMagic, sizeof(kMagic));
  const std::string meta = metadata.dump();
  write_u32(out, static_cast<std::uint32_t>(meta.size()));
  out.write(meta.data(), static_cast<std::streamsize>(meta.size()));
  write_u32(out, static_cast<std::uint32_t>(store.size()));
  for (const ParameterStore::Entry& e : store.entries()) {
    write_u32(out, static_cast<std::uint32_t>(e.name.size()));
    out.write(e.name.data(), static_cast<std::streamsize>(e.name.size()));
    write_u32(out, static_cast<std::uint32_t>(e.tensor.shape().size()));
    for (int d : e.tensor.shape()) {
      const std::int64_t d64 = d;
      out.write(reinterpret_cast<const char*>(&d64), sizeof(d64));
    }
    out.write(reinterpret_cast<const char*>(e.tensor.values().data()),
              static_cast<std::streamsize>(e.tensor.size() * sizeof(double)));
  }
  if (!out) throw CheckpointError("checkpoint write failed: " + path);
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CheckpointError("cannot open checkpoint for reading: " + path);

  char magic[8];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
    throw CheckpointError("not a checkpoint file (bad magic): " + path);
  }

  Checkpoint ckpt;
  const std::uint32_t meta_len = read_u32(in);
  std::string meta(meta_len, '\0');
  in.read(meta.data(), meta_len);
  try {
    ckpt.metadata = nlohmann::json::parse(meta);
  } catch (const nlohmann::json::parse_error& e) {
    throw CheckpointError(std::string("corrupt checkpoint metadata: ") + e.what());
  }

  const std::uint32_t n_records = read_u32(in);
  for (std::uint32_t r = 0; r < n_records; ++r) {
    CheckpointRecord record;
    const std::uint32_t name_len = read_u32(in);
    record.name.resize(name_len);
    in.read(record.name.data(), name_len);
    const std::uint32_t ndims = read_u32(in);
    std::int64_t numel = 1;
    for (std::uint32_t d = 0; d < ndims; ++d) {
      std::int64_t dim = 0;
      in.read(reinterpret_cast<char*>(&dim), sizeof(dim));
      record.shape.push_back(static_cast<int>(dim));
      numel *= dim;
    }
    if (!in || numel <= 0) throw CheckpointError("corrupt checkpoint record: " + path);
    record.values.resize(static_cast<std::size_t>(numel));
    in.read(reinterpret_cast<char*>(record.values.data()),
            static_cast<std::streamsize>(numel * sizeof(double)));
    if (!in) throw CheckpointError("truncated checkpoint: " + path);
    ckpt.records.push_back(std::move(record));
  }
  return ckpt;
}

void restore_parameters(ParameterStore& store, const Checkpoint& checkpoint) {
  if (checkpoint.records.size() != store.size()) {
    throw CheckpointError("checkpoint parameter count mismatch");
  }
  for (const CheckpointRecord& record : checkpoint.records) {
    Tensor& t = store.get(record.name);
    if (t.shape() != record.shape) {
      throw CheckpointError("checkpoint shape mismatch for " + record.name);
    }
    for (Eigen::Index i = 0; i < t.size(); ++i) {
      t.values()[i] = record.values[static_cast<std::size_t>(i)];
    }
  }
}

}  // namespace synthrl::diffkit
