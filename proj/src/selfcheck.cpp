#include "ans/selfcheck.hpp"

#include <cmath>
#include <random>
#include <sstream>

#include <numbers>

#include "ans/operators.hpp"

namespace ans {

namespace {

CheckRow row(std::string name, double measured, double threshold, std::string detail = {}) {
  return {std::move(name), "", measured, threshold, measured < threshold, std::move(detail)};
}

ScalarField random_field(const Grid& g, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n01;
  ScalarField f = ScalarField::zeros(g, Representation::physical);
  for (double& v : f.physical()) v = n01(rng);
  return f;
}

double max_diff(const ScalarField& a, const ScalarField& b) {
  const ScalarField sa = to_spectral(a);
  const ScalarField sb = to_spectral(b);
  const auto x = sa.spectral();
  const auto y = sb.spectral();
  double m = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) m = std::max(m, std::abs(x[i] - y[i]));
  return m;
}

double max_coeff(const ScalarField& a) {
  double m = 0.0;
  const ScalarField s = to_spectral(a);
  for (const Complex& z : s.spectral()) m = std::max(m, std::abs(z));
  return m;
}

}  // namespace

std::vector<CheckRow> multiplier_identity_checks() {
  std::vector<CheckRow> out;
  const Grid g = make_grid(32, 16, 20.0, 10.0);
  double err33 = 0.0;
  double err333 = 0.0;
  for (double t : {0.5, 1.0, 4.0}) {
    KernelSymbolSpec k;
    k.t = t;
    KernelSymbolSpec d33 = k;
    d33.alpha = {0, 0, 2};
    KernelSymbolSpec d333 = k;
    d333.alpha = {0, 0, 3};
    KernelSymbolSpec lap = k;
    lap.gamma = 2;
    KernelSymbolSpec twisted = k;
    twisted.tilde = true;
    twisted.gamma = 3;
    g.for_each_mode([&](const Wave& w) {
      if (w.zero()) return;
      const double heat = std::exp(-t * w.xi_h2());
      const Complex lhs2 = kernel_symbol(d33, w);
      const Complex rhs2 = -heat + kernel_symbol(lap, w);
      err33 = std::max(err33, std::abs(lhs2 - rhs2));
      const Complex lhs3 = kernel_symbol(d333, w);
      const Complex rhs3 = -heat * monomial_symbol(w, {0, 0, 1}) - kernel_symbol(twisted, w);
      err333 = std::max(err333, std::abs(lhs3 - rhs3) / std::max(1.0, std::abs(w.xi[2])));
    });
  }
  out.push_back(row("kernel_identity_d33", err33, 1e-14, "max over nonzero modes, t in {0.5, 1, 4}"));
  out.push_back(row("kernel_identity_d333", err333, 1e-14,
                    "max over nonzero modes of error / max(1, |xi3|)"));

  const VelocityField u(random_field(g, 11), random_field(g, 12), random_field(g, 13));
  const VelocityField pu = helmholtz_project(u);
  const VelocityField ppu = helmholtz_project(pu);
  double idem = 0.0;
  double scale = 0.0;
  for (int k = 0; k < 3; ++k) {
    idem = std::max(idem, max_diff(ppu[k], pu[k]));
    scale = std::max(scale, max_coeff(pu[k]));
  }
  out.push_back(row("projection_idempotence", idem / scale, 1e-12, "max|PPu - Pu| / max|Pu|"));

  const ScalarField phi = random_field(g, 14);
  const VelocityField grad(derivative(phi, {1, 0, 0}), derivative(phi, {0, 1, 0}),
                           derivative(phi, {0, 0, 1}));
  const VelocityField pg = helmholtz_project(grad);
  double ann = 0.0;
  double gscale = 0.0;
  for (int k = 0; k < 3; ++k) {
    ann = std::max(ann, max_coeff(pg[k]));
    gscale = std::max(gscale, max_coeff(grad[k]));
  }
  out.push_back(row("projection_annihilates_gradients", ann / gscale, 1e-12,
                    "max|P grad phi| / max|grad phi|"));

  const ScalarField f = to_spectral(random_field(g, 15));
  double comp = 0.0;
  for (auto [s, t] : {std::pair{0.3, 0.7}, std::pair{1.0, 2.5}, std::pair{0.0, 4.0}}) {
    const ScalarField a = heat_semigroup_h(heat_semigroup_h(f, s), t);
    const ScalarField b = heat_semigroup_h(f, s + t);
    comp = std::max(comp, max_diff(a, b) / max_coeff(f));
  }
  out.push_back(row("semigroup_composition", comp, 1e-14,
                    "max|E(t)E(s)f - E(t+s)f| / max|f|, spectral"));
  return out;
}

std::vector<CheckRow> kernel_oracle_checks() {
  std::vector<CheckRow> out;
  const std::vector<std::pair<double, double>> points{
      {0.0, 0.0}, {0.0, 0.5}, {0.0, 1.0}, {0.0, 2.0}, {0.0, -3.0}, {0.5, 0.0}, {0.5, 0.25},
      {0.5, 1.5}, {1.0, 0.0},  {1.0, 0.5}, {1.0, -1.0}, {1.5, 2.5}, {2.0, 0.0}, {2.0, 1.0},
      {2.5, -0.75}, {3.0, 0.0}, {3.0, 3.0}, {4.0, 0.5}, {5.0, 2.0}, {6.0, -4.0}, {0.25, 0.1},
      {8.0, 0.0}};
  for (double t : {0.5, 1.0, 4.0}) {
    double worst = 0.0;
    for (auto [r, z] : points)
      worst = std::max(worst, std::abs(kernel_physical(t, r, z) - kernel_time_integral(t, r, z)));
    std::ostringstream name;
    name << "kernel_oracle_t" << t;
    std::ostringstream detail;
    detail << points.size() << " points, max |Hankel - time integral|";
    out.push_back(row(name.str(), worst, 1e-6, detail.str()));
  }
  return out;
}

std::vector<CheckRow> gaussian_norm_checks() {
  std::vector<CheckRow> out;
  const Grid g = make_grid(512, 4, 40.0, 4.0);
  const ScalarField g1 = gaussian_h_field(g, 1.0);
  out.push_back(row("gaussian_L1", std::abs(norm(g1, NormSpec::mixed(1.0, kInf)) - 1.0), 1e-6,
                    "| ||G_h(1)||_L1 - 1 |, L_h = 40, n_h = 512"));
  out.push_back(row("gaussian_L2",
                    std::abs(norm(g1, NormSpec::mixed(2.0, kInf)) - 1.0 / std::sqrt(8.0 * std::numbers::pi)),
                    1e-6, "| ||G_h(1)||_L2 - (8 pi)^{-1/2} |"));

  double analytic = 0.0;
  double discrete = 0.0;
  double closed = 0.0;
  const std::vector<double> times{1.0, 1.5, 2.0, 3.0, 4.0};
  for (double p : {1.0, 2.0, kInf}) {
    const double inv_p = std::isinf(p) ? 0.0 : 1.0 / p;
    for (int m : {0, 1}) {
      for (int a : {0, 1}) {
        const double e = gaussian_h_norm_exponent(p, m, a);
        analytic = std::max(analytic, std::abs(e - (-(1.0 - inv_p) - 0.5 * a + 0.5 * m)));
        DecaySeries s;
        s.label = "gaussian";
        for (double t : times) {
          const ScalarField f = gaussian_h_field(g, t, {a, 0});
          const double v = norm(f, NormSpec::mixed(p, kInf, m));
          s.push(t, v);
          const double c = gaussian_h_norm(t, p, m, a);
          closed = std::max(closed, std::abs(v - c) / c);
        }
        discrete = std::max(discrete, std::abs(fit_rate(s).slope - e));
      }
    }
  }
  out.push_back(row("gaussian_exponents_analytic", analytic, 1e-15,
                    "closed-form exponent vs -(1-1/p) - |a|/2 + m/2"));
  out.push_back(row("gaussian_exponents_discrete", discrete, 1e-3,
                    "fitted slope of grid norms, t in [1, 4], p in {1, 2, inf}, m, |a| in {0, 1}"));
  out.push_back(row("gaussian_norms_closed_form", closed, 1e-3,
                    "relative error of grid norms against closed forms"));
  return out;
}

std::vector<CheckRow> fit_checks() {
  std::vector<CheckRow> out;
  DecaySeries s;
  s.label = "synthetic";
  for (int i = 0; i <= 20; ++i) {
    const double t = std::pow(10.0, 2.0 * i / 20.0);
    s.push(t, 5.0 * std::pow(t, -0.75));
  }
  const RateFit f = fit_rate(s);
  out.push_back(row("fit_power_law_slope", std::abs(f.slope + 0.75), 1e-12, "y = 5 t^-0.75"));
  out.push_back(row("fit_power_law_residual", f.residual_rms, 1e-12, "log-log RMS residual"));
  out.push_back(row("fit_power_law_intercept", std::abs(f.intercept - std::log(5.0)), 1e-12,
                    "intercept vs log 5"));
  DecaySeries scaled = s;
  for (double& v : scaled.values) v *= 37.0;
  const RateFit g = fit_rate(scaled);
  out.push_back(row("fit_scale_invariance", std::abs(g.slope - f.slope), 1e-12,
                    "slope change under y -> 37 y"));
  return out;
}

}  // namespace ans

namespace ans {

namespace {

VelocityField order_test_data(const Grid& g) {
  return preset_initial_data("random-solenoidal", 0.5, g, 7, 6);
}

double l2_distance(const VelocityField& a, const VelocityField& b) {
  VelocityField d = to_physical(a);
  d *= -1.0;
  d += to_physical(b);
  return norm(d, NormSpec::lp(2.0));
}

}  // namespace

double temporal_order(std::vector<double>* errors) {
  const Grid g = make_grid(16, 16, 2.0 * std::numbers::pi, 2.0 * std::numbers::pi);
  const VelocityField u0 = order_test_data(g);
  auto solve = [&](double dt) {
    SolverConfig c;
    c.dt = dt;
    c.t_end = 1.0;
    return run(u0, c, std::vector<double>{0.0, 1.0}, "order").store.at(1);
  };
  const VelocityField ref = solve(1.0 / 320.0);
  std::vector<double> e;
  for (double dt : {0.1, 0.05, 0.025}) e.push_back(l2_distance(solve(dt), ref));
  if (errors) *errors = e;
  return std::log2(e[1] / e[2]);
}

double local_order() {
  const Grid g = make_grid(16, 16, 2.0 * std::numbers::pi, 2.0 * std::numbers::pi);
  const VelocityField u0 = order_test_data(g);
  const SolverConfig c;
  auto defect = [&](double dt) {
    const VelocityField one = step(u0, dt, c);
    const VelocityField two = step(step(u0, 0.5 * dt, c), 0.5 * dt, c);
    return l2_distance(one, two);
  };
  return std::log2(defect(0.025) / defect(0.0125));
}

}  // namespace ans
