#pragma once

#include <string>
#include <vector>

#include "ans/grid.hpp"

namespace ans {

/// Snapshot times: uniform spacing on [0, head_end], then head_end * 2^{k/n}
/// for k >= 1 while below t_end, then t_end itself.
struct SnapshotSchedule {
  double head_spacing = 0.02;
  double head_end = 1.0;
  int per_octave = 4;
  double t_end = 1.0;

  void validate() const;
  std::vector<double> times() const;
  std::string describe() const;
  /// The same schedule with half the head spacing and twice the octave density.
  SnapshotSchedule refined() const;
};

/// Ordered divergence-free snapshots on one grid, held in physical form.
class SnapshotStore {
 public:
  SnapshotStore(Grid grid, std::string schedule);

  /// Appends a snapshot; times must increase strictly and the first one must
  /// be zero.
  void append(double t, const VelocityField& u);

  std::size_t size() const { return times_.size(); }
  bool empty() const { return times_.empty(); }
  const std::vector<double>& times() const { return times_; }
  const VelocityField& at(std::size_t i) const { return fields_.at(i); }
  const Grid& grid() const { return grid_; }
  const std::string& schedule() const { return schedule_; }
  double last_time() const { return times_.back(); }

  /// Index of the snapshot at time t (relative tolerance 1e-9), or -1.
  long index_of(double t) const;
  /// Snapshots whose times appear in `keep`; every requested time must exist.
  SnapshotStore subsample(const std::vector<double>& keep, std::string schedule) const;
  /// Snapshots with time <= t_max.
  SnapshotStore truncated(double t_max) const;

 private:
  Grid grid_;
  std::string schedule_;
  std::vector<double> times_;
  std::vector<VelocityField> fields_;
};

}  // namespace ans
