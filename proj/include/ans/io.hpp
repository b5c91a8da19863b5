#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "ans/grid.hpp"
#include "ans/series.hpp"
#include "ans/snapshot_store.hpp"

namespace ans {

/// Binary snapshot: "ANS1", u32 n_h, n_h, n_v, f64 L_h, L_v, t, then the
/// three components as f64, x3 fastest. All little-endian.
void write_snapshot(const std::filesystem::path& path, const VelocityField& u, double t);

struct LoadedSnapshot {
  double t = 0.0;
  VelocityField u;
};
LoadedSnapshot read_snapshot(const std::filesystem::path& path);

/// Writes snap_NNNN.bin files plus store.json (times, files, schedule).
void save_store(const SnapshotStore& store, const std::filesystem::path& dir);
SnapshotStore load_store(const std::filesystem::path& dir);

/// CSV with header series_label,t,value,scaled_value.
void write_series_csv(const std::filesystem::path& path, const std::vector<DecaySeries>& series);
std::vector<DecaySeries> read_series_csv(const std::filesystem::path& path);

}  // namespace ans
