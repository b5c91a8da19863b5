#include "ans/snapshot_store.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace ans {

void SnapshotSchedule::validate() const {
  if (!(head_spacing > 0.0)) throw std::invalid_argument("head spacing must be positive");
  if (!(head_end > 0.0)) throw std::invalid_argument("head end must be positive");
  if (per_octave < 1) throw std::invalid_argument("per_octave must be >= 1");
  if (!(t_end > 0.0)) throw std::invalid_argument("t_end must be positive");
  const double n = head_end / head_spacing;
  if (std::abs(n - std::round(n)) > 1e-9 * n)
    throw std::invalid_argument("head spacing must divide the head interval");
}

std::vector<double> SnapshotSchedule::times() const {
  validate();
  std::vector<double> out;
  const long n = std::lround(head_end / head_spacing);
  for (long i = 0; i <= n; ++i) {
    const double t = static_cast<double>(i) * head_spacing;
    if (t > t_end * (1.0 + 1e-12)) break;
    out.push_back(t);
  }
  for (int k = 1;; ++k) {
    const double t = head_end * std::exp2(static_cast<double>(k) / per_octave);
    if (t >= t_end * (1.0 - 1e-12)) break;
    if (t > out.back()) out.push_back(t);
  }
  if (out.back() < t_end * (1.0 - 1e-12)) out.push_back(t_end);
  return out;
}

std::string SnapshotSchedule::describe() const {
  std::ostringstream os;
  os << "uniform " << head_spacing << " on [0, " << head_end << "], geometric 2^(k/"
     << per_octave << "), t_end " << t_end;
  return os.str();
}

SnapshotSchedule SnapshotSchedule::refined() const {
  SnapshotSchedule r = *this;
  r.head_spacing = 0.5 * head_spacing;
  r.per_octave = 2 * per_octave;
  return r;
}

SnapshotStore::SnapshotStore(Grid grid, std::string schedule)
    : grid_(std::move(grid)), schedule_(std::move(schedule)) {}

void SnapshotStore::append(double t, const VelocityField& u) {
  if (!std::isfinite(t)) throw std::invalid_argument("snapshot time must be finite");
  if (times_.empty() && t != 0.0)
    throw std::invalid_argument("first snapshot must be the initial data at t = 0");
  if (!times_.empty() && !(t > times_.back()))
    throw std::invalid_argument("snapshot times must increase strictly");
  if (!u.grid().same_shape(grid_))
    throw std::invalid_argument("snapshot grid differs from the store grid");
  if (!u.divergence_free()) throw std::invalid_argument("snapshots must be certified divergence-free");
  times_.push_back(t);
  fields_.push_back(to_physical(u));
}

long SnapshotStore::index_of(double t) const {
  for (std::size_t i = 0; i < times_.size(); ++i)
    if (std::abs(times_[i] - t) <= 1e-9 * std::max(1.0, std::abs(t)))
      return static_cast<long>(i);
  return -1;
}

SnapshotStore SnapshotStore::subsample(const std::vector<double>& keep,
                                       std::string schedule) const {
  SnapshotStore out(grid_, std::move(schedule));
  for (double t : keep) {
    const long i = index_of(t);
    if (i < 0) throw std::invalid_argument("subsample time not present in store");
    out.append(times_[static_cast<std::size_t>(i)], fields_[static_cast<std::size_t>(i)]);
  }
  return out;
}

SnapshotStore SnapshotStore::truncated(double t_max) const {
  SnapshotStore out(grid_, schedule_);
  for (std::size_t i = 0; i < times_.size(); ++i)
    if (times_[i] <= t_max * (1.0 + 1e-12)) out.append(times_[i], fields_[i]);
  return out;
}

}  // namespace ans
