#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "pgorder/graph.hpp"
#include "pgorder/nn/params.hpp"

namespace pgorder::nn {

struct EpochRecord {
  int epoch = 0;
  double train_loss = 0.0;
  double val_tau = 0.0;
  double val_pmr = 0.0;

  friend bool operator==(const EpochRecord&, const EpochRecord&) = default;
};

struct Checkpoint {
  ModelConfig config;
  ParamStore<float> params;
  int epoch = 0;  // epoch the parameters were taken from
  std::vector<EpochRecord> history;

  friend bool operator==(const Checkpoint&, const Checkpoint&) = default;
};

inline constexpr std::uint32_t kCheckpointVersion = 1;

/// Binary layout, little-endian:
///   "PGORDCKP" | u32 version | u32 n + n bytes of JSON (config, epoch, history)
///   | u32 param count | per param: u32 name length, name, u32 rows, u32 cols,
///   rows*cols f32 values.
void write_checkpoint(std::ostream& out, const Checkpoint& ckpt);
Checkpoint read_checkpoint(std::istream& in);
// Writes to a temporary file in the same directory, then renames.
void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt);
Checkpoint load_checkpoint(const std::filesystem::path& path);

/// Throws Error when `requested` differs from the variant the checkpoint was
/// trained with, unless `force` is set.
void require_compatible(const Checkpoint& ckpt, GraphVariant requested, bool force);

}  // namespace pgorder::nn
