#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "ans/grid.hpp"
#include "ans/series.hpp"
#include "ans/snapshot_store.hpp"
#include "ans/solver.hpp"

namespace ans {

/// Everything a batch run needs. Parsed from INI-style text with sections
/// grid, solver, data, diagnostics and output; unknown keys are errors.
struct ExperimentConfig {
  std::string name = "custom";

  int n_h = 64;
  int n_v = 32;
  double L_h = 85.0;
  double L_v = 8.0;

  double dt = 0.05;
  double dt_head = 0.0025;
  double t_end = 50.0;
  double cfl_safety = 0.5;
  bool linear_only = false;
  double tail_threshold = 1e-8;

  std::string preset = "corollary-phi";
  double eta = 0.01;
  std::uint64_t seed = 1;
  int bumps = 4;

  double head_spacing = 0.02;
  double head_end = 1.0;
  int per_octave = 4;

  /// Diagnostic groups: decay, linear, mixed, profiles, plateau, energy.
  std::vector<std::string> checks{"decay", "linear", "mixed", "profiles", "energy"};
  std::vector<double> remainder_p{2.0, kInf};
  double fit_t_min = 5.0;
  double fit_t_max = 50.0;
  double plateau_t_min = 10.0;
  double plateau_t_max = 50.0;

  std::string out_dir = "ans-out";

  /// Largest horizon for which G_h(t, L_h/2) stays negligible: (L_h/12)^2.
  double validity_window() const { return (L_h / 12.0) * (L_h / 12.0); }
  bool has_check(const std::string& group) const;
  Grid grid() const;
  SolverConfig solver() const;
  SnapshotSchedule schedule() const;
  void validate() const;
};

ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::filesystem::path& path);
std::string to_ini(const ExperimentConfig& config);
/// FNV-1a of the canonical INI text.
std::uint64_t config_hash(const ExperimentConfig& config);

/// Named experiment presets: "thm1-decay" and "corollary".
ExperimentConfig experiment_preset(const std::string& name);
std::vector<std::string> experiment_preset_names();

/// Initial data sampled at box-centered coordinates, projected and scaled by
/// eta. Names: corollary-phi, random-solenoidal, gaussian-shear.
VelocityField preset_initial_data(const std::string& name, double eta, const Grid& grid,
                                  std::uint64_t seed = 1, int bumps = 4);
/// The same field before projection (and before scaling).
VelocityField preset_raw_data(const std::string& name, const Grid& grid, std::uint64_t seed = 1,
                              int bumps = 4);

/// Exponent formulas.
double uh_decay_exponent(double p, int derivative_order);
double u3_decay_exponent(double p, int derivative_order);
double enhanced_dissipation_exponent(double p, double q);
double u3_second_order_exponent(double p);

enum class Bound { equal, at_least, at_most };

/// One row of the expected-exponent table.
struct ExpectedExponent {
  std::string series;
  std::string source;
  std::string group;
  double exponent = 0.0;
  double tolerance = 0.0;
  Bound bound = Bound::equal;

  bool accepts(double slope) const;
};

const std::vector<ExpectedExponent>& expected_exponent_table();
const ExpectedExponent* find_expected(const std::string& series);

/// A fitted series, with its expectation when the table has one.
struct FitRow {
  std::string series;
  FitWindow window;
  RateFit fit;
  std::optional<ExpectedExponent> expected;
  bool pass = true;
  std::string detail;
};

/// A scalar pass/fail assertion.
struct CheckRow {
  std::string name;
  std::string source;
  double measured = 0.0;
  double threshold = 0.0;
  bool pass = true;
  std::string detail;
};

struct Report {
  std::string experiment;
  std::string version;
  std::uint64_t config_hash = 0;
  std::string config_text;
  std::string schedule;
  std::size_t snapshots = 0;
  std::vector<FitRow> fits;
  std::vector<CheckRow> checks;
  std::vector<std::string> warnings;
  std::vector<DecaySeries> series;

  bool all_pass() const;
  std::string text() const;
  std::string json() const;
};

std::string code_version();

/// Norm series of the run at every positive snapshot time: uh_L2, u3_L2,
/// uh_Linf, u3_Linf, grad_h_uh_L2 and the t^{3/2}-scaled u3_Linf.
std::vector<DecaySeries> decay_norms(const SnapshotStore& store);

/// Diagnostics and assertions for a finished store. The ledger is optional
/// (absent when re-analyzing persisted snapshots).
Report analyze(const SnapshotStore& store, const ExperimentConfig& config,
               const EnergyLedger* ledger = nullptr,
               const std::vector<std::string>& run_warnings = {});

/// report.txt, report.json and one CSV per series.
void write_report(const Report& report, const std::filesystem::path& dir);

/// Runs the solver, persists snapshots under out_dir/snapshots and the
/// report under out_dir. Errors name the failing stage.
Report run_experiment(const ExperimentConfig& config);
/// Re-runs the diagnostics on out_dir/snapshots.
Report analyze_directory(const ExperimentConfig& config);

}  // namespace ans
