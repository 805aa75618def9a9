#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "ringheom/dynamics_cl.hpp"
#include "ringheom/dynamics_risb.hpp"

namespace ringheom {

inline constexpr const char* kVersion = "0.1.0";

// Shortest exact decimal form: parsing the string recovers the double bit
// for bit.
std::string format_double(double v);

// Generic column-oriented CSV with a header row; all columns equal length.
void write_csv(const std::filesystem::path& file, const std::vector<std::string>& header,
               const std::vector<const Eigen::ArrayXd*>& columns);

// Field snapshot: CSV with header n,theta_index,value plus a JSON sidecar
// (<file>.json) describing the grid. Round trips bit exactly.
void save_snapshot(const std::filesystem::path& csv, const WignerField& w);
void save_snapshot(const std::filesystem::path& csv, const CLField& w);
WignerField load_ring_snapshot(const std::filesystem::path& csv);
CLField load_cl_snapshot(const std::filesystem::path& csv);

struct CheckpointMeta {
  std::string model;  // "risb" or "cl"
  int K = 0;
  int n_trunc = 0;
  BathSpec bath;
  RingParams ring;
};

// Stack checkpoint: a directory holding one grid sidecar, a per-index field
// CSV each, and a manifest with the hierarchy metadata needed to rebuild the
// stack.
void save_checkpoint(const std::filesystem::path& dir, const AdoStack& stack,
                     const CheckpointMeta& meta);
void save_checkpoint(const std::filesystem::path& dir, const CLStack& stack,
                     const CheckpointMeta& meta);
AdoStack load_ring_checkpoint(const std::filesystem::path& dir, CheckpointMeta* meta = nullptr);
CLStack load_cl_checkpoint(const std::filesystem::path& dir, CheckpointMeta* meta = nullptr);

}  // namespace ringheom
