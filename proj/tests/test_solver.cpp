#include <doctest.h>

#include <cmath>
#include <numbers>

#include "ans/experiment.hpp"
#include "ans/operators.hpp"
#include "ans/selfcheck.hpp"
#include "ans/solver.hpp"

using namespace ans;

namespace {

constexpr double kPi = std::numbers::pi;

double max_spectral_diff(const VelocityField& a, const VelocityField& b) {
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

Grid small_grid() { return make_grid(16, 16, 12.0, 8.0); }

}  // namespace

TEST_SUITE("solver") {

TEST_CASE("config validation") {
  SolverConfig c;
  c.dt = 0.0;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c.dt = 0.5;
  c.t_end = 0.25;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c.t_end = 1.0;
  c.cfl_safety = 1.5;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c.cfl_safety = 0.5;
  c.dt_head = -1.0;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c.dt_head = 0.1;
  CHECK_NOTHROW(c.validate());
  CHECK(c.step_at(0.5) == 0.1);
  CHECK(c.step_at(1.0) == 0.5);
}

TEST_CASE("zero data stays zero") {
  const Grid g = small_grid();
  VelocityField u0 = VelocityField::zeros(g, Representation::physical);
  u0.set_divergence_free(true);
  SolverConfig c;
  c.dt = 0.1;
  c.t_end = 1.0;
  const RunResult r = run(u0, c, std::vector<double>{0.0, 0.5, 1.0}, "test");
  REQUIRE(r.store.size() == 3);
  for (std::size_t i = 0; i < r.store.size(); ++i)
    for (int k = 0; k < 3; ++k) CHECK(max_abs(r.store.at(i)[k]) == 0.0);
}

TEST_CASE("linear step is the heat semigroup") {
  const Grid g = small_grid();
  const VelocityField u0 = preset_initial_data("random-solenoidal", 1.0, g, 3);
  SolverConfig c;
  c.linear_only = true;
  CHECK(max_spectral_diff(step(u0, 0.37, c), heat_semigroup_h(u0, 0.37)) < 1e-14);

  c.dt = 0.05;
  c.t_end = 2.0;
  SnapshotSchedule s;
  s.head_spacing = 0.1;
  s.t_end = 2.0;
  const RunResult r = run(u0, c, s);
  for (std::size_t i = 0; i < r.store.size(); ++i)
    CHECK(max_spectral_diff(r.store.at(i), heat_semigroup_h(u0, r.store.times()[i])) < 1e-12);
}

TEST_CASE("step keeps the field real and divergence free") {
  const Grid g = small_grid();
  const VelocityField u0 = preset_initial_data("random-solenoidal", 0.3, g, 4);
  const VelocityField u1 = step(u0, 0.05, SolverConfig{});
  CHECK(u1.divergence_free());
  CHECK(divergence_ratio(u1) <= kDivergenceTolerance);
  const VelocityField s = to_spectral(u1);
  double umax = 0.0;
  for (int k = 0; k < 3; ++k) umax = std::max(umax, max_abs(to_physical(s[k])));
  for (int k = 0; k < 3; ++k) CHECK(conjugate_asymmetry(s[k]) < 1e-12 * umax);
}

TEST_CASE("CFL violation names the speed") {
  const Grid g = small_grid();
  const VelocityField u0 = preset_initial_data("random-solenoidal", 50.0, g, 5);
  try {
    (void)step(u0, 0.5, SolverConfig{});
    FAIL("expected a CFL error");
  } catch (const std::runtime_error& e) {
    CHECK(std::string(e.what()).find("max|u|") != std::string::npos);
  }
}

TEST_CASE("uncertified input is rejected") {
  const Grid g = small_grid();
  const VelocityField raw = preset_raw_data("gaussian-shear", g);
  CHECK_THROWS_AS(step(raw, 0.1, SolverConfig{}), std::invalid_argument);
  SolverConfig c;
  CHECK_THROWS_AS(run(raw, c, std::vector<double>{0.0, 1.0}, "x"), std::invalid_argument);
}

TEST_CASE("snapshot times are hit exactly") {
  const Grid g = small_grid();
  const VelocityField u0 = preset_initial_data("corollary-phi", 0.05, g);
  SolverConfig c;
  c.dt = 0.07;
  c.t_end = 1.0;
  const std::vector<double> times{0.0, 0.1, 0.33, 1.0};
  const RunResult r = run(u0, c, times, "custom");
  CHECK(r.store.times() == times);
  CHECK(r.ledger.times().back() == 1.0);
  CHECK_THROWS_AS(run(u0, c, std::vector<double>{0.1, 0.2}, "x"), std::invalid_argument);
  CHECK_THROWS_AS(run(u0, c, std::vector<double>{0.0, 0.2, 0.2}, "x"), std::invalid_argument);
}

TEST_CASE("temporal order of the integrating-factor scheme") {
  std::vector<double> errors;
  const double order = temporal_order(&errors);
  INFO("errors " << errors[0] << " " << errors[1] << " " << errors[2]);
  CHECK(order >= 3.6);
  CHECK(order <= 4.4);
  const double local = local_order();
  CHECK(local >= 4.5);
  CHECK(local <= 5.5);
}

TEST_CASE("energy ledger on a small-data run") {
  // Resolved data: the Gaussian is sampled well above its spectral width.
  const Grid g = make_grid(32, 32, 12.0, 8.0);
  const VelocityField u0 = preset_initial_data("corollary-phi", 0.01, g);
  SolverConfig c;
  c.dt = 0.0025;
  c.t_end = 0.5;
  SnapshotSchedule s;
  s.head_spacing = 0.25;
  s.head_end = 0.5;
  s.t_end = 0.5;
  const RunResult r = run(u0, c, s);
  const EnergyLedger& l = r.ledger;
  for (std::size_t i = 1; i < l.times().size(); ++i) CHECK(l.times()[i] > l.times()[i - 1]);
  for (int sigma = 0; sigma <= 2; ++sigma) CHECK(l.max_inequality_ratio(sigma) <= 1.0 + 1e-4);
  CHECK(l.max_relative_drift() < 1e-4);
  CHECK(l.kinetic().front() == doctest::Approx(0.5 * std::pow(hs_norm(u0, 0), 2)).epsilon(1e-12));

  EnergyLedger copy = l;
  CHECK_THROWS_AS(copy.record(0.5, u0), std::invalid_argument);
}

TEST_CASE("vertical tail monitor") {
  const Grid g = make_grid(8, 16, 2.0 * kPi, 2.0 * kPi);
  VelocityField smooth(ScalarField::sample(g, [](double, double, double x3) { return std::sin(x3); }),
                       ScalarField::zeros(g, Representation::physical),
                       ScalarField::zeros(g, Representation::physical));
  REQUIRE(smooth.certify());
  CHECK(vertical_tail_fraction(smooth) < 1e-20);
  VelocityField rough(
      ScalarField::sample(g, [](double, double, double x3) { return std::sin(x3) + std::sin(5.0 * x3); }),
      ScalarField::zeros(g, Representation::physical), ScalarField::zeros(g, Representation::physical));
  REQUIRE(rough.certify());
  CHECK(vertical_tail_fraction(rough) == doctest::Approx(0.5).epsilon(1e-12));
  SolverConfig c;
  c.dt = 0.05;
  c.t_end = 0.1;
  const RunResult r = run(rough, c, std::vector<double>{0.0, 0.1}, "x");
  CHECK(r.warnings.size() == 2);
}

TEST_CASE("snapshot schedule") {
  SnapshotSchedule s;
  s.head_spacing = 0.25;
  s.head_end = 1.0;
  s.per_octave = 2;
  s.t_end = 5.0;
  const auto t = s.times();
  const std::vector<double> expect{0.0, 0.25, 0.5, 0.75, 1.0, std::sqrt(2.0), 2.0,
                                   2.0 * std::sqrt(2.0), 4.0, 5.0};
  REQUIRE(t.size() == expect.size());
  for (std::size_t i = 0; i < t.size(); ++i) CHECK(t[i] == doctest::Approx(expect[i]).epsilon(1e-14));
  const auto fine = s.refined().times();
  for (double x : t) {
    bool found = false;
    for (double y : fine) found = found || std::abs(x - y) <= 1e-12 * std::max(1.0, x);
    CHECK(found);
  }
  SnapshotSchedule bad = s;
  bad.per_octave = 0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("snapshot store") {
  const Grid g = small_grid();
  const VelocityField u = preset_initial_data("corollary-phi", 0.1, g);
  SnapshotStore store(g, "test");
  CHECK_THROWS_AS(store.append(0.5, u), std::invalid_argument);
  store.append(0.0, u);
  store.append(0.5, u);
  CHECK_THROWS_AS(store.append(0.5, u), std::invalid_argument);
  store.append(1.0, u);
  CHECK(store.index_of(0.5) == 1);
  CHECK(store.index_of(0.5 * (1.0 + 1e-12)) == 1);
  CHECK(store.index_of(0.7) == -1);
  const SnapshotStore sub = store.subsample({0.0, 1.0}, "sub");
  CHECK(sub.size() == 2);
  CHECK_THROWS_AS(store.subsample({0.0, 0.7}, "bad"), std::invalid_argument);
  CHECK(store.truncated(0.6).size() == 2);
  VelocityField raw = preset_raw_data("gaussian-shear", g);
  SnapshotStore other(g, "x");
  CHECK_THROWS_AS(other.append(0.0, raw), std::invalid_argument);
}

}  // TEST_SUITE
