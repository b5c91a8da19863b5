#pragma once

#include <array>
#include <string>
#include <vector>

#include "ans/grid.hpp"
#include "ans/snapshot_store.hpp"

namespace ans {

struct SolverConfig {
  double dt = 0.05;
  /// Step size used on [0, head_end); 0 means dt. A fixed two-level
  /// schedule, not error-controlled.
  double dt_head = 0.0;
  double head_end = 1.0;
  double t_end = 1.0;
  double cfl_safety = 0.5;
  /// Drops the nonlinearity; the step is then the exact heat multiplier.
  bool linear_only = false;
  /// Warn when the energy fraction in the top third of retained vertical
  /// modes exceeds this.
  double tail_threshold = 1e-8;

  double step_at(double t) const { return dt_head > 0.0 && t < head_end ? dt_head : dt; }
  void validate() const;
};

/// Per-step energy bookkeeping. Index sigma in 0..2 selects the H^sigma
/// variants; kinetic() is half the squared L2 norm.
class EnergyLedger {
 public:
  void record(double t, const VelocityField& u);

  const std::vector<double>& times() const { return times_; }
  std::vector<double> kinetic() const;
  /// ||u(t)||^2 in H^sigma.
  const std::vector<double>& norm_sq(int sigma) const { return norm_sq_.at(sigma); }
  /// int_0^t ||grad_h u||^2_{H^sigma} by the trapezoid rule.
  const std::vector<double>& dissipation(int sigma) const { return dissipation_.at(sigma); }

  /// max_t |1/2||u||^2 - 1/2||u0||^2 + int ||grad_h u||^2| / (1/2||u0||^2).
  double max_relative_drift() const;
  /// max_t (||u||^2 + 2 int ||grad_h u||^2) / (2 ||u0||^2) in H^sigma.
  double max_inequality_ratio(int sigma) const;

 private:
  std::vector<double> times_;
  std::array<std::vector<double>, 3> norm_sq_;
  std::array<std::vector<double>, 3> rate_;
  std::array<std::vector<double>, 3> dissipation_;
};

/// -P div(u (x) u) with two-thirds dealiasing before and after the product.
/// Throws for uncertified input. Returns a spectral, certified field.
VelocityField nonlinear_rhs(const VelocityField& u);

/// One integrating-factor RK4 step of size dt. Throws std::runtime_error on a
/// CFL violation. Returns a spectral, projected field.
VelocityField step(const VelocityField& u, double dt, const SolverConfig& config);

struct RunResult {
  SnapshotStore store;
  EnergyLedger ledger;
  std::vector<std::string> warnings;
};

/// Integrates from t = 0 and stores a snapshot at every requested time
/// (the step before a snapshot is shortened to hit it exactly).
RunResult run(const VelocityField& u0, const SolverConfig& config,
              const std::vector<double>& snapshot_times, const std::string& schedule);
RunResult run(const VelocityField& u0, const SolverConfig& config,
              const SnapshotSchedule& schedule);

/// Fraction of energy in retained vertical modes above two thirds of the cutoff.
double vertical_tail_fraction(const VelocityField& u);

}  // namespace ans
