// Acceptance runner: one PASS/FAIL line per criterion, details indented below.
// Exits nonzero when any criterion fails.

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "ans/asymptotics.hpp"
#include "ans/duhamel.hpp"
#include "ans/experiment.hpp"
#include "ans/io.hpp"
#include "ans/operators.hpp"
#include "ans/selfcheck.hpp"
#include "ans/solver.hpp"

using namespace ans;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

struct Item {
  std::string name;
  double measured = 0.0;
  std::string threshold;
  bool pass = true;
  std::string detail;
};

struct Criterion {
  int id = 0;
  std::string title;
  std::vector<Item> items;

  bool pass() const {
    for (const auto& i : items)
      if (!i.pass) return false;
    return !items.empty();
  }

  void add(std::string name, double measured, std::string threshold, bool pass,
           std::string detail = {}) {
    items.push_back({std::move(name), measured, std::move(threshold), pass, std::move(detail)});
  }

  void add_below(const std::string& name, double measured, double limit, std::string detail = {}) {
    std::ostringstream t;
    t << "< " << limit;
    add(name, measured, t.str(), measured < limit, std::move(detail));
  }

  void add_rows(const std::vector<CheckRow>& rows) {
    for (const auto& r : rows) {
      std::ostringstream t;
      t << "<= " << r.threshold;
      add(r.name, r.measured, t.str(), r.pass, r.detail);
    }
  }

  void add_fit(const Report& report, const std::string& series) {
    for (const auto& f : report.fits) {
      if (f.series != series) continue;
      std::ostringstream t;
      if (f.expected) {
        const auto& e = *f.expected;
        if (e.bound == Bound::equal) t << e.exponent << " +- " << e.tolerance;
        if (e.bound == Bound::at_least) t << ">= " << e.exponent - e.tolerance;
        if (e.bound == Bound::at_most) t << "<= " << e.exponent + e.tolerance;
      }
      std::ostringstream d;
      d << "slope over [" << f.window.t_min << ", " << f.window.t_max << "], n " << f.fit.samples
        << ", log rms " << f.fit.residual_rms;
      if (!f.detail.empty()) d << "; " << f.detail;
      add(series + " slope", f.fit.slope, t.str(), f.pass, d.str());
      return;
    }
    add(series + " slope", 0.0, "present", false, "series not fitted");
  }

  void add_check(const Report& report, const std::string& name) {
    for (const auto& c : report.checks) {
      if (c.name != name) continue;
      std::ostringstream t;
      t << c.threshold;
      add(name, c.measured, t.str(), c.pass, c.detail);
      return;
    }
    add(name, 0.0, "present", false, "check not produced");
  }

  void print(std::ostream& os) const {
    os << (pass() ? "PASS" : "FAIL") << " criterion " << id << ": " << title << "\n";
    for (const auto& i : items) {
      os << "    " << (i.pass ? "ok  " : "FAIL") << " " << std::left << std::setw(44) << i.name
         << " measured " << std::setw(13) << i.measured << " expect " << i.threshold;
      if (!i.detail.empty()) os << "  (" << i.detail << ")";
      os << "\n";
    }
    os.flush();
  }
};

double relative_spectral_diff(const VelocityField& a, const VelocityField& b) {
  const VelocityField x = to_spectral(a);
  const VelocityField y = to_spectral(b);
  double d = 0.0;
  double s = 0.0;
  for (int k = 0; k < 3; ++k)
    for (std::size_t i = 0; i < x[k].spectral().size(); ++i) {
      d = std::max(d, std::abs(x[k].spectral()[i] - y[k].spectral()[i]));
      s = std::max(s, std::abs(y[k].spectral()[i]));
    }
  return s == 0.0 ? d : d / s;
}

bool bit_equal(const VelocityField& a, const VelocityField& b) {
  const VelocityField x = to_physical(a);
  const VelocityField y = to_physical(b);
  for (int k = 0; k < 3; ++k) {
    const auto p = x[k].physical();
    const auto q = y[k].physical();
    if (p.size() != q.size() || std::memcmp(p.data(), q.data(), p.size() * sizeof(double)) != 0)
      return false;
  }
  return true;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance criteria"};
  std::string workdir = "acceptance-run";
  app.add_option("--workdir", workdir, "scratch directory for persisted snapshots");
  CLI11_PARSE(app, argc, argv);

  try {
    fs::remove_all(workdir);
    fs::create_directories(workdir);
    std::vector<Criterion> results;
    auto finish = [&](Criterion c) {
      c.print(std::cout);
      results.push_back(std::move(c));
    };

    {
      Criterion c{1, "multiplier identity suite", {}};
      const auto start = Clock::now();
      c.add_rows(multiplier_identity_checks());
      c.add_below("runtime_seconds", seconds_since(start), 10.0);
      finish(std::move(c));
    }
    {
      Criterion c{2, "kernel oracle", {}};
      const auto start = Clock::now();
      c.add_rows(kernel_oracle_checks());
      c.add_below("runtime_seconds", seconds_since(start), 60.0);
      finish(std::move(c));
    }
    {
      Criterion c{3, "Gaussian closed forms", {}};
      c.add_rows(gaussian_norm_checks());
      finish(std::move(c));
    }

    // One nonlinear run on the refined schedule; the coarse store is its
    // subsample, so both Duhamel schedules share a trajectory.
    const ExperimentConfig config = experiment_preset("thm1-decay");
    const Grid grid = config.grid();
    const VelocityField u0 =
        preset_initial_data(config.preset, config.eta, grid, config.seed, config.bumps);
    const SnapshotSchedule coarse_schedule = config.schedule();
    const SnapshotSchedule fine_schedule = coarse_schedule.refined();
    std::cout << "running " << config.name << " on " << fine_schedule.describe() << "\n"
              << std::flush;
    const auto run_start = Clock::now();
    const RunResult fine = run(u0, config.solver(), fine_schedule);
    const double run_seconds = seconds_since(run_start);
    const SnapshotStore coarse = fine.store.subsample(coarse_schedule.times(), coarse_schedule.describe());
    std::cout << "run finished in " << run_seconds << " s, " << fine.store.size()
              << " snapshots\n"
              << std::flush;
    const Report report = analyze(coarse, config, &fine.ledger, fine.warnings);

    {
      Criterion c{4, "solver validity", {}};
      SolverConfig lin = config.solver();
      lin.linear_only = true;
      const RunResult linear = run(u0, lin, coarse_schedule);
      double worst = 0.0;
      for (std::size_t i = 0; i < linear.store.size(); ++i)
        worst = std::max(worst, relative_spectral_diff(linear.store.at(i),
                                                       heat_semigroup_h(u0, linear.store.times()[i])));
      c.add_below("linear_run_vs_semigroup", worst, 1e-12,
                  "max over snapshots of max|coefficient difference| / max|coefficient|");
      c.add_check(report, "energy_balance_drift");
      for (int sigma = 0; sigma <= 2; ++sigma)
        c.add_check(report, "energy_inequality_H" + std::to_string(sigma));
      std::vector<double> errors;
      const double order = temporal_order(&errors);
      std::ostringstream d;
      d << "errors";
      for (double e : errors) d << " " << e;
      c.add("temporal_order", order, "[3.6, 4.4]", order >= 3.6 && order <= 4.4, d.str());
      finish(std::move(c));
    }
    {
      Criterion c{5, "Duhamel reconstruction", {}};
      const auto start = Clock::now();
      const std::vector<double> targets{1.0, 4.0, 16.0};
      const auto rc = reconstruction_residuals(coarse, targets, 2.0);
      const auto rf = reconstruction_residuals(fine.store, targets, 2.0);
      for (std::size_t i = 0; i < targets.size(); ++i) {
        std::ostringstream n;
        n << "t=" << targets[i];
        c.add_below("residual_coarse_" + n.str(), rc[i], 1e-3, "head spacing 0.02");
        c.add_below("residual_refined_" + n.str(), rf[i], 1e-3, "head spacing 0.01");
        const double ratio = rf[i] / rc[i];
        c.add("refined_over_coarse_" + n.str(), ratio, "[0.4, 0.6]", ratio >= 0.4 && ratio <= 0.6);
      }
      c.add_below("runtime_seconds", seconds_since(start) + run_seconds, 900.0,
                  "nonlinear run plus both reconstructions");
      finish(std::move(c));
    }
    {
      Criterion c{6, "linear decay slopes", {}};
      for (const char* s : {"heat_u_L2", "heat_u3_L2_h_L2_v", "heat_u3_Linf_h_Linf_v"})
        c.add_fit(report, s);
      finish(std::move(c));
    }
    {
      Criterion c{7, "nonlinear decay slopes", {}};
      for (const char* s : {"uh_L2", "u3_L2", "uh_Linf", "grad_h_uh_L2"}) c.add_fit(report, s);
      finish(std::move(c));
    }
    {
      Criterion c{8, "profile convergence", {}};
      c.add_check(report, "remainder_uh_leading_L2_scaled_ratio");
      c.add_check(report, "remainder_uh_leading_Linf_scaled_ratio");
      c.add_fit(report, "remainder_u3_second_order_L2");
      finish(std::move(c));
    }
    {
      Criterion c{9, "corollary plateau", {}};
      const ExperimentConfig cor = experiment_preset("corollary");
      const Report r = analyze(coarse, cor, &fine.ledger);
      c.add_check(r, "u3_initial_mass_zero");
      c.add_check(r, "u3_Linf_plateau_cv");
      c.add_check(r, "u3_Linf_plateau_min");
      finish(std::move(c));
    }
    {
      Criterion c{10, "mixed and weighted diagnostics", {}};
      for (const char* s : {"u_Linf_h_L1_v", "xh_u3_L1_h_Linf_v", "xh_uh_L1_h_Linf_v"})
        c.add_fit(report, s);
      finish(std::move(c));
    }
    {
      Criterion c{11, "tooling exactness", {}};
      c.add_rows(fit_checks());
      const fs::path dir = fs::path(workdir) / "snapshots";
      save_store(coarse, dir);
      const SnapshotStore loaded = load_store(dir);
      bool exact = loaded.times() == coarse.times();
      for (std::size_t i = 0; exact && i < coarse.size(); ++i)
        exact = bit_equal(loaded.at(i), coarse.at(i));
      c.add("snapshot_round_trip_bit_exact", exact ? 0.0 : 1.0, "identical", exact,
            std::to_string(coarse.size()) + " snapshots");
      const Report again = analyze(loaded, config);
      double worst = 0.0;
      bool same_rows = again.fits.size() == report.fits.size();
      for (std::size_t i = 0; same_rows && i < report.fits.size(); ++i) {
        same_rows = again.fits[i].series == report.fits[i].series;
        worst = std::max(worst, std::abs(again.fits[i].fit.slope - report.fits[i].fit.slope));
        worst = std::max(worst, std::abs(again.fits[i].fit.intercept - report.fits[i].fit.intercept));
      }
      c.add("rerun_fit_difference", worst, "<= 1e-12", same_rows && worst <= 1e-12,
            std::to_string(report.fits.size()) + " fits, slope and intercept");
      finish(std::move(c));
    }

    write_report(report, fs::path(workdir) / "report");
    int failed = 0;
    for (const auto& c : results) failed += c.pass() ? 0 : 1;
    std::cout << (failed == 0 ? "ALL PASS" : std::to_string(failed) + " criteria failed") << "\n";
    return failed == 0 ? 0 : 1;
  } catch (const std::exception& e) {
    std::cerr << "acceptance: " << e.what() << "\n";
    return 2;
  }
}
