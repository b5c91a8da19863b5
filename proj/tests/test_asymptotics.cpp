#include <doctest.h>

#include <cmath>
#include <numbers>

#include "ans/asymptotics.hpp"
#include "ans/experiment.hpp"
#include "ans/operators.hpp"
#include "ans/solver.hpp"

using namespace ans;

namespace {

constexpr double kPi = std::numbers::pi;

DecaySeries power_series(double a, double c, double t0, double t1, int n) {
  DecaySeries s;
  s.label = "power";
  for (int i = 0; i < n; ++i) {
    const double t = t0 * std::pow(t1 / t0, static_cast<double>(i) / (n - 1));
    s.push(t, c * std::pow(t, a));
  }
  return s;
}

// Horizontal Gaussian of width s shifted by (a, 0) times a vertical profile.
ScalarField shifted_gaussian(const Grid& g, double s, double a) {
  return ScalarField::sample(g, [&](double x1, double x2, double x3) {
    return gaussian_h(s, x1 - a, x2) * (1.0 + 0.5 * std::cos(2.0 * kPi * x3 / g.L_v()));
  });
}

RunResult phi_run(double t_end) {
  const Grid g = make_grid(64, 16, 24.0, 8.0);
  const VelocityField u0 = preset_initial_data("corollary-phi", 0.05, g);
  SolverConfig c;
  c.dt = 0.05;
  c.t_end = t_end;
  SnapshotSchedule s;
  s.head_spacing = 0.25;
  s.per_octave = 4;
  s.t_end = t_end;
  return run(u0, c, s);
}

}  // namespace

TEST_SUITE("asymptotics") {

TEST_CASE("masses and moments of the corollary data") {
  const Grid g = make_grid(64, 32, 12.0, 8.0);
  const VelocityField u = preset_raw_data("corollary-phi", g);
  const VerticalProfile m2 = horizontal_mass(u[1]);
  const auto y3 = horizontal_first_moment(u[2]);
  double e_mass = 0.0;
  double e_y1 = 0.0;
  double e_y2 = 0.0;
  for (int i = 0; i < g.n_v(); ++i) {
    const double z = g.coord_v(i);
    const auto iz = static_cast<std::size_t>(i);
    e_mass = std::max(e_mass, std::abs(m2.values[iz] + z * kPi * std::exp(-z * z)));
    e_y1 = std::max(e_y1, std::abs(y3[0].values[iz]));
    e_y2 = std::max(e_y2, std::abs(y3[1].values[iz] - 0.5 * kPi * std::exp(-z * z)));
  }
  CHECK(e_mass < 1e-10);
  CHECK(e_y1 < 1e-10);
  CHECK(e_y2 < 1e-10);
  CHECK(horizontal_mass(u[0]).max_abs() == 0.0);
  CHECK(horizontal_mass(u[2]).max_abs() < 1e-12);
}

TEST_CASE("even field has no first moment") {
  const Grid g = make_grid(64, 8, 30.0, 4.0);
  const ScalarField f = shifted_gaussian(g, 1.0, 0.0);
  for (const auto& y : horizontal_first_moment(f)) CHECK(y.max_abs() < 1e-13);
}

TEST_CASE("structural identities of divergence-free data") {
  // Both boxes hold the data to round-off in every direction, so the
  // spectral derivatives see periodic, resolved fields.
  const Grid g = make_grid(64, 64, 12.0, 12.0);
  const StructuralDefects a = structural_defects(preset_initial_data("corollary-phi", 1.0, g));
  CHECK(a.mass_derivative <= 1e-8);
  CHECK(a.semigroup_divergence <= 1e-8);
  CHECK(a.moment_identity <= 1e-8);
  const Grid c = make_grid(64, 64, 16.0, 16.0);
  const StructuralDefects b = structural_defects(preset_initial_data("random-solenoidal", 1.0, c, 3), 0.5);
  CHECK(b.mass_derivative <= 1e-8);
  CHECK(b.semigroup_divergence <= 1e-8);
  CHECK(b.moment_identity <= 1e-8);
}

TEST_CASE("fit_rate") {
  const RateFit f = fit_rate(power_series(-0.75, 3.0, 1.0, 100.0, 12));
  CHECK(f.slope == doctest::Approx(-0.75).epsilon(1e-12));
  CHECK(std::exp(f.intercept) == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(f.residual_rms < 1e-12);
  CHECK(f.samples == 12);

  DecaySeries log_series;
  for (int t = 10; t <= 1000; ++t) log_series.push(t, std::log(t) / t);
  const RateFit g = fit_rate(log_series);
  CHECK(g.slope == doctest::Approx(-0.8046).epsilon(1e-3));
  CHECK(g.slope > -1.0);
  CHECK(g.slope < -0.8);

  DecaySeries flat;
  for (int t = 1; t <= 10; ++t) flat.push(t, 2.0);
  CHECK(std::abs(fit_rate(flat).slope) < 1e-14);

  CHECK_THROWS_AS(fit_rate(power_series(-1.0, 1.0, 1.0, 10.0, 4)), std::invalid_argument);
  DecaySeries bad = power_series(-1.0, 1.0, 1.0, 10.0, 8);
  bad.values[3] = 0.0;
  CHECK_THROWS_AS(fit_rate(bad), std::invalid_argument);
  CHECK_THROWS_AS(fit_rate(power_series(-1.0, 1.0, 1.0, 10.0, 8), {20.0, 30.0}), std::invalid_argument);

  const RateFit w = fit_rate(power_series(-0.5, 1.0, 1.0, 100.0, 20), {10.0, 100.0});
  CHECK(w.slope == doctest::Approx(-0.5).epsilon(1e-12));
  CHECK(w.samples < 20);
}

TEST_CASE("fit_rate is scale invariant") {
  const DecaySeries s = power_series(-1.3, 1.0, 2.0, 50.0, 10);
  DecaySeries v = s;
  for (double& x : v.values) x *= 1e6;
  DecaySeries t = s;
  for (double& x : t.times) x *= 7.0;
  CHECK(fit_rate(v).slope == doctest::Approx(fit_rate(s).slope).epsilon(1e-12));
  CHECK(fit_rate(t).slope == doctest::Approx(fit_rate(s).slope).epsilon(1e-12));
  const DecaySeries sc = s.scaled_by(1.3);
  CHECK(std::abs(fit_scaled_rate(sc).slope) < 1e-12);
}

TEST_CASE("expansion scale powers") {
  CHECK(expansion_scale_power(Expansion::uh_leading, 2.0) == doctest::Approx(0.5));
  CHECK(expansion_scale_power(Expansion::uh_leading, kInf) == doctest::Approx(1.0));
  CHECK(expansion_scale_power(Expansion::u3_leading, 2.0) == doctest::Approx(0.75));
  CHECK(expansion_scale_power(Expansion::u3_second_order, 2.0) == doctest::Approx(1.0));
  CHECK(expansion_scale_power(Expansion::u3_second_order_linear, kInf) == doctest::Approx(1.5));
  CHECK(expansion_scale_power(Expansion::uh_leading, 1.0) == 0.0);
  CHECK(is_linear(Expansion::u3_leading_linear));
  CHECK_FALSE(is_linear(Expansion::u3_leading));
  CHECK(expansion_label(Expansion::u3_second_order) == "u3-second-order");
}

TEST_CASE("nonlinear expansions need corrections") {
  const Grid g = make_grid(16, 8, 12.0, 8.0);
  const VelocityField u = preset_initial_data("corollary-phi", 0.05, g);
  SnapshotStore store(g, "x");
  store.append(0.0, u);
  store.append(1.0, u);
  const Profiles p = linear_profiles(u);
  CHECK_THROWS_AS(remainder_series(store, p, Expansion::u3_second_order, 2.0), std::invalid_argument);
  CHECK_NOTHROW(remainder_series(store, p, Expansion::u3_second_order_linear, 2.0));
}

TEST_CASE("linear profile remainder of a centered Gaussian") {
  // e^{t Delta_h} G_h(s) = G_h(t + s), so the remainder is G_h(t + s) - G_h(t).
  const Grid g = make_grid(128, 4, 60.0, 4.0);
  const double s = 1.0;
  const double t = 4.0;
  const ScalarField f = shifted_gaussian(g, s, 0.0);
  const ScalarField r0 = linear_profile_remainder(f, t, 0);
  const ScalarField r1 = linear_profile_remainder(f, t, 1);
  const ScalarField e = ScalarField::sample(g, [&](double x1, double x2, double x3) {
    return (gaussian_h(t + s, x1, x2) - gaussian_h(t, x1, x2)) *
           (1.0 + 0.5 * std::cos(2.0 * kPi * x3 / g.L_v()));
  });
  ScalarField d = r0;
  d -= e;
  CHECK(max_abs(d) < 1e-12 * max_abs(e));
  ScalarField d1 = r1;
  d1 -= r0;
  CHECK(max_abs(d1) < 1e-12 * max_abs(e));
  CHECK_THROWS_AS(linear_profile_remainder(f, t, 2), std::invalid_argument);
}

TEST_CASE("linear profile remainders gain half a power per order") {
  const Grid g = make_grid(256, 4, 200.0, 4.0);
  const ScalarField f = shifted_gaussian(g, 1.0, 1.5);
  for (int m : {0, 1}) {
    DecaySeries s;
    for (double t : {8.0, 16.0, 32.0, 64.0, 128.0})
      s.push(t, norm(linear_profile_remainder(f, t, m), NormSpec::lp(2.0)));
    const double expect = -0.5 - 0.5 * (m + 1);
    INFO("m = " << m << " slope " << fit_rate(s).slope);
    CHECK(fit_rate(s).slope == doctest::Approx(expect).epsilon(0.1 / std::abs(expect)));
  }
}

TEST_CASE("nonlinear corrections") {
  const Grid g = make_grid(16, 8, 12.0, 8.0);
  VelocityField z = VelocityField::zeros(g, Representation::physical);
  z.set_divergence_free(true);
  SnapshotStore zero(g, "zero");
  zero.append(0.0, z);
  zero.append(1.0, z);
  const NonlinearCorrection c0 = nonlinear_correction(zero, CorrectionKind::horizontal);
  for (const auto& p : c0.profiles) CHECK(p.max_abs() == 0.0);
  SnapshotStore single(g, "one");
  single.append(0.0, z);
  CHECK_THROWS_AS(nonlinear_correction(single, CorrectionKind::horizontal), std::invalid_argument);

  // Extending the time horizon moves the profile by less than the tail bound.
  const RunResult r = phi_run(8.0);
  const double dz = r.store.grid().dx_v();
  for (CorrectionKind kind : {CorrectionKind::horizontal, CorrectionKind::vertical_second_order}) {
    const NonlinearCorrection half = nonlinear_correction(r.store, kind, 4.0);
    const NonlinearCorrection full = nonlinear_correction(r.store, kind);
    CHECK(half.t_max == doctest::Approx(4.0));
    CHECK(full.t_max == doctest::Approx(8.0));
    REQUIRE(std::isfinite(half.tail_estimate));
    for (std::size_t k = 0; k < 2; ++k) {
      VerticalProfile diff = full.profiles[k];
      for (std::size_t i = 0; i < diff.values.size(); ++i) diff.values[i] -= half.profiles[k].values[i];
      INFO("change " << diff.l1(dz) << " tail " << half.tail_estimate);
      CHECK(diff.l1(dz) <= half.tail_estimate);
    }
  }
}

}  // TEST_SUITE
