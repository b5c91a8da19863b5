#include "ans/asymptotics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "ans/operators.hpp"

namespace ans {

// ---------------------------------------------------------------------------
// Series and fits

DecaySeries DecaySeries::window(double t_min, double t_max) const {
  DecaySeries out;
  out.label = label;
  out.scale_power = scale_power;
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (times[i] < t_min * (1.0 - 1e-12) || times[i] > t_max * (1.0 + 1e-12)) continue;
    out.times.push_back(times[i]);
    out.values.push_back(values[i]);
    out.scaled.push_back(scaled[i]);
  }
  return out;
}

DecaySeries DecaySeries::scaled_by(double power) const {
  DecaySeries out = *this;
  out.scale_power = power;
  for (std::size_t i = 0; i < times.size(); ++i)
    out.scaled[i] = values[i] * std::pow(times[i], power);
  return out;
}

namespace {

RateFit fit_columns(const std::vector<double>& t, const std::vector<double>& v,
                    const std::string& label, FitWindow window) {
  std::vector<double> x;
  std::vector<double> y;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (t[i] < window.t_min * (1.0 - 1e-12) || t[i] > window.t_max * (1.0 + 1e-12)) continue;
    if (!(t[i] > 0.0)) throw std::invalid_argument(label + ": fit needs positive times");
    if (!(v[i] > 0.0) || !std::isfinite(v[i]))
      throw std::invalid_argument(label + ": fit needs positive finite values");
    x.push_back(std::log(t[i]));
    y.push_back(std::log(v[i]));
  }
  if (x.size() < 5) throw std::invalid_argument(label + ": fewer than 5 samples in window");
  const double n = static_cast<double>(x.size());
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0;
  double sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx == 0.0) throw std::invalid_argument(label + ": fit window has a single time");
  RateFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double ss = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - (fit.intercept + fit.slope * x[i]);
    ss += r * r;
  }
  fit.residual_rms = std::sqrt(ss / n);
  fit.samples = x.size();
  return fit;
}

}  // namespace

RateFit fit_rate(const DecaySeries& series, FitWindow window) {
  return fit_columns(series.times, series.values, series.label, window);
}

RateFit fit_scaled_rate(const DecaySeries& series, FitWindow window) {
  return fit_columns(series.times, series.scaled, series.label, window);
}

// ---------------------------------------------------------------------------
// Profiles

double VerticalProfile::max_abs() const {
  double m = 0.0;
  for (double v : values) m = std::max(m, std::abs(v));
  return m;
}

double VerticalProfile::l1(double dx_v) const {
  double s = 0.0;
  for (double v : values) s += std::abs(v);
  return s * dx_v;
}

VerticalProfile horizontal_mass(const ScalarField& f) {
  const Grid& g = f.grid();
  const auto d = f.physical();
  VerticalProfile out;
  out.tag = "mass";
  out.values.assign(static_cast<std::size_t>(g.n_v()), 0.0);
  for (int i1 = 0; i1 < g.n_h(); ++i1)
    for (int i2 = 0; i2 < g.n_h(); ++i2) {
      const std::size_t base = g.physical_index(i1, i2, 0);
      for (int i3 = 0; i3 < g.n_v(); ++i3)
        out.values[static_cast<std::size_t>(i3)] += d[base + static_cast<std::size_t>(i3)];
    }
  for (double& v : out.values) v *= g.cell_area();
  return out;
}

std::array<VerticalProfile, 2> horizontal_first_moment(const ScalarField& f) {
  const Grid& g = f.grid();
  const auto d = f.physical();
  std::array<VerticalProfile, 2> out;
  for (int k = 0; k < 2; ++k) {
    out[static_cast<std::size_t>(k)].tag = k == 0 ? "moment_y1" : "moment_y2";
    out[static_cast<std::size_t>(k)].values.assign(static_cast<std::size_t>(g.n_v()), 0.0);
  }
  for (int i1 = 0; i1 < g.n_h(); ++i1) {
    const double y1 = g.coord_h(i1);
    for (int i2 = 0; i2 < g.n_h(); ++i2) {
      const double y2 = g.coord_h(i2);
      const std::size_t base = g.physical_index(i1, i2, 0);
      for (int i3 = 0; i3 < g.n_v(); ++i3) {
        const double v = d[base + static_cast<std::size_t>(i3)];
        out[0].values[static_cast<std::size_t>(i3)] += y1 * v;
        out[1].values[static_cast<std::size_t>(i3)] += y2 * v;
      }
    }
  }
  for (auto& p : out)
    for (double& v : p.values) v *= g.cell_area();
  return out;
}

ScalarField profile_field(const Grid& grid, double t, std::array<int, 2> alpha_h,
                          const VerticalProfile& profile) {
  if (profile.values.size() != static_cast<std::size_t>(grid.n_v()))
    throw std::invalid_argument("profile length does not match the grid");
  const ScalarField gh = gaussian_h_field(grid, t, alpha_h);
  const auto h = gh.physical();
  ScalarField out(grid, Representation::physical);
  auto o = out.physical();
  for (std::size_t i = 0; i < o.size(); ++i)
    o[i] = h[i] * profile.values[i % static_cast<std::size_t>(grid.n_v())];
  return out;
}

// ---------------------------------------------------------------------------
// Nonlinear corrections

NonlinearCorrection nonlinear_correction(const SnapshotStore& store, CorrectionKind kind,
                                         double t_max) {
  if (store.size() < 2) throw std::invalid_argument("correction needs at least two snapshots");
  if (t_max < 0.0) t_max = store.last_time();
  const Grid& g = store.grid();
  NonlinearCorrection out;
  out.t_max = t_max;
  out.integrand_l1.label =
      kind == CorrectionKind::horizontal ? "integrand_d3_u3uh_L1" : "integrand_u3uh_L1";
  for (int k = 0; k < 2; ++k) {
    auto& p = out.profiles[static_cast<std::size_t>(k)];
    p.tag = (kind == CorrectionKind::horizontal ? "int_d3_u3u" : "int_u3u") + std::to_string(k + 1);
    p.values.assign(static_cast<std::size_t>(g.n_v()), 0.0);
  }

  std::array<std::vector<double>, 2> prev;
  double t_prev = 0.0;
  bool first = true;
  for (std::size_t i = 0; i < store.size(); ++i) {
    const double t = store.times()[i];
    if (t > t_max * (1.0 + 1e-12)) break;
    const QuadraticProducts prod = quadratic_products(store.at(i));
    std::array<ScalarField, 2> integrand{to_physical(prod[pair_index(2, 0)]),
                                         to_physical(prod[pair_index(2, 1)])};
    if (kind == CorrectionKind::horizontal)
      for (auto& f : integrand) f = derivative(f, {0, 0, 1});
    out.integrand_l1.push(t, norm(std::span<const ScalarField>(integrand), NormSpec::lp(1.0)));
    std::array<std::vector<double>, 2> cur{horizontal_mass(integrand[0]).values,
                                           horizontal_mass(integrand[1]).values};
    if (!first) {
      const double h = t - t_prev;
      for (std::size_t k = 0; k < 2; ++k)
        for (std::size_t z = 0; z < cur[k].size(); ++z)
          out.profiles[k].values[z] += 0.5 * h * (prev[k][z] + cur[k][z]);
    }
    prev = std::move(cur);
    t_prev = t;
    first = false;
  }
  out.t_max = t_prev;

  const FitWindow tail_window{std::max(1.0, 0.1 * t_prev), t_prev};
  try {
    out.tail_fit = fit_rate(out.integrand_l1, tail_window);
    const double a = -out.tail_fit.slope;
    if (a > 1.0) {
      const double c = std::exp(out.tail_fit.intercept);
      out.tail_estimate = c * std::pow(t_prev, 1.0 - a) / (a - 1.0);
    } else {
      out.tail_estimate = kInf;
      out.warnings.push_back("integrand decays too slowly for a finite tail estimate");
    }
    if (out.tail_fit.residual_rms > 0.05) {
      std::ostringstream os;
      os << "integrand not yet in its power-law regime (log residual "
         << out.tail_fit.residual_rms << ")";
      out.warnings.push_back(os.str());
    }
  } catch (const std::invalid_argument& e) {
    out.tail_estimate = kInf;
    out.warnings.push_back(std::string("tail fit refused: ") + e.what());
  }
  for (auto& p : out.profiles) p.tail_estimate = out.tail_estimate;
  return out;
}

// ---------------------------------------------------------------------------
// Remainders

std::string expansion_label(Expansion e) {
  switch (e) {
    case Expansion::uh_leading: return "uh-leading";
    case Expansion::u3_leading: return "u3-leading";
    case Expansion::u3_second_order: return "u3-second-order";
    case Expansion::uh_leading_linear: return "uh-leading-linear";
    case Expansion::u3_leading_linear: return "u3-leading-linear";
    case Expansion::u3_second_order_linear: return "u3-second-order-linear";
  }
  return "unknown";
}

bool is_linear(Expansion e) {
  return e == Expansion::uh_leading_linear || e == Expansion::u3_leading_linear ||
         e == Expansion::u3_second_order_linear;
}

double expansion_scale_power(Expansion e, double p) {
  const double inv_p = std::isinf(p) ? 0.0 : 1.0 / p;
  switch (e) {
    case Expansion::uh_leading:
    case Expansion::uh_leading_linear:
      return 1.0 - inv_p;
    case Expansion::u3_leading:
    case Expansion::u3_leading_linear:
      return 1.5 * (1.0 - inv_p);
    case Expansion::u3_second_order:
    case Expansion::u3_second_order_linear:
      return 1.5 * (1.0 - inv_p) + 0.5 * inv_p;
  }
  return 0.0;
}

Profiles linear_profiles(const VelocityField& u0) {
  const VelocityField p = to_physical(u0);
  Profiles out;
  for (int k = 0; k < 3; ++k) out.mass[static_cast<std::size_t>(k)] = horizontal_mass(p[k]);
  out.moment3 = horizontal_first_moment(p[2]);
  return out;
}

Profiles compute_profiles(const SnapshotStore& store) {
  Profiles out = linear_profiles(store.at(0));
  out.correction_h = nonlinear_correction(store, CorrectionKind::horizontal);
  out.correction_v = nonlinear_correction(store, CorrectionKind::vertical_second_order);
  out.has_corrections = true;
  return out;
}

ScalarField linear_profile_remainder(const ScalarField& f, double t, int m) {
  if (m != 0 && m != 1) throw std::invalid_argument("profile order must be 0 or 1");
  const ScalarField fp = to_physical(f);
  ScalarField r = to_physical(heat_semigroup_h(fp, t));
  r -= profile_field(fp.grid(), t, {0, 0}, horizontal_mass(fp));
  if (m == 1) {
    const auto y = horizontal_first_moment(fp);
    r += profile_field(fp.grid(), t, {1, 0}, y[0]);
    r += profile_field(fp.grid(), t, {0, 1}, y[1]);
  }
  return r;
}

DecaySeries remainder_series(const SnapshotStore& store, const Profiles& profiles,
                             Expansion expansion, double p, double t_min, double t_max) {
  const bool linear = is_linear(expansion);
  if (!linear && !profiles.has_corrections)
    throw std::invalid_argument("expansion " + expansion_label(expansion) +
                                " needs the nonlinear corrections");
  const Grid& g = store.grid();
  const VelocityField u0 = to_physical(store.at(0));
  DecaySeries out;
  out.label = expansion_label(expansion);
  const double power = expansion_scale_power(expansion, p);
  for (std::size_t i = 0; i < store.size(); ++i) {
    const double t = store.times()[i];
    if (!(t > 0.0) || t < t_min * (1.0 - 1e-12) || t > t_max * (1.0 + 1e-12)) continue;
    const VelocityField u = linear ? to_physical(heat_semigroup_h(u0, t)) : store.at(i);
    double value = 0.0;
    if (expansion == Expansion::uh_leading || expansion == Expansion::uh_leading_linear) {
      std::array<ScalarField, 2> r{u[0], u[1]};
      for (int k = 0; k < 2; ++k) {
        const auto ku = static_cast<std::size_t>(k);
        r[ku] -= profile_field(g, t, {0, 0}, profiles.mass[ku]);
        if (!linear) r[ku] += profile_field(g, t, {0, 0}, profiles.correction_h.profiles[ku]);
      }
      value = norm(std::span<const ScalarField>(r), NormSpec::lp(p));
    } else {
      ScalarField r = u[2];
      r -= profile_field(g, t, {0, 0}, profiles.mass[2]);
      if (expansion == Expansion::u3_second_order ||
          expansion == Expansion::u3_second_order_linear) {
        r += profile_field(g, t, {1, 0}, profiles.moment3[0]);
        r += profile_field(g, t, {0, 1}, profiles.moment3[1]);
        if (!linear) {
          r -= profile_field(g, t, {1, 0}, profiles.correction_v.profiles[0]);
          r -= profile_field(g, t, {0, 1}, profiles.correction_v.profiles[1]);
        }
      }
      value = norm(r, NormSpec::lp(p));
    }
    out.times.push_back(t);
    out.values.push_back(value);
    out.scaled.push_back(value * std::pow(t, power));
  }
  out.scale_power = power;
  return out;
}

// ---------------------------------------------------------------------------
// Diagnostics

namespace {

std::string exponent_name(double e) {
  if (std::isinf(e)) return "inf";
  std::ostringstream os;
  os << e;
  return os.str();
}

}  // namespace

std::vector<DecaySeries> diagnostic_norms(
    const SnapshotStore& store, const std::vector<std::pair<double, double>>& enhanced) {
  DecaySeries mixed;
  mixed.label = "u_Linf_h_L1_v";
  DecaySeries weighted_h;
  weighted_h.label = "xh_uh_L1_h_Linf_v";
  DecaySeries weighted_3;
  weighted_3.label = "xh_u3_L1_h_Linf_v";
  std::vector<DecaySeries> linear(enhanced.size());
  for (std::size_t n = 0; n < enhanced.size(); ++n)
    linear[n].label = "heat_u3_L" + exponent_name(enhanced[n].first) + "_h_L" +
                      exponent_name(enhanced[n].second) + "_v";
  const ScalarField u03 = to_physical(store.at(0)[2]);
  for (std::size_t i = 0; i < store.size(); ++i) {
    const double t = store.times()[i];
    if (!(t > 0.0)) continue;
    const VelocityField& u = store.at(i);
    mixed.push(t, norm(u, NormSpec::mixed(kInf, 1.0)));
    const std::array<ScalarField, 2> uh{u[0], u[1]};
    weighted_h.push(t, norm(std::span<const ScalarField>(uh), NormSpec::mixed(1.0, kInf, 1)));
    weighted_3.push(t, norm(u[2], NormSpec::mixed(1.0, kInf, 1)));
    const ScalarField heat3 = to_physical(heat_semigroup_h(u03, t));
    for (std::size_t n = 0; n < enhanced.size(); ++n)
      linear[n].push(t, norm(heat3, NormSpec::mixed(enhanced[n].first, enhanced[n].second)));
  }
  std::vector<DecaySeries> out{mixed, weighted_h, weighted_3};
  out.insert(out.end(), linear.begin(), linear.end());
  return out;
}

StructuralDefects structural_defects(const VelocityField& u0, double t) {
  const VelocityField u = to_physical(u0);
  StructuralDefects d;

  const ScalarField d3u3 = derivative(u[2], {0, 0, 1});
  {
    const VerticalProfile m = horizontal_mass(d3u3);
    double scale = 0.0;
    ScalarField abs_field = d3u3;
    for (double& v : abs_field.physical()) v = std::abs(v);
    scale = horizontal_mass(abs_field).max_abs();
    d.mass_derivative = scale == 0.0 ? m.max_abs() : m.max_abs() / scale;
  }
  {
    const ScalarField a = derivative(heat_semigroup_h(u[2], t), {0, 0, 1});
    ScalarField s = a;
    s += derivative(heat_semigroup_h(u[0], t), {1, 0, 0});
    s += derivative(heat_semigroup_h(u[1], t), {0, 1, 0});
    const double scale = max_abs(a);
    d.semigroup_divergence = scale == 0.0 ? max_abs(s) : max_abs(s) / scale;
  }
  {
    const auto y = horizontal_first_moment(d3u3);
    double worst = 0.0;
    double scale = 0.0;
    for (int k = 0; k < 2; ++k) {
      const VerticalProfile mk = horizontal_mass(u[k]);
      scale = std::max(scale, mk.max_abs());
      for (std::size_t z = 0; z < mk.values.size(); ++z)
        worst = std::max(worst, std::abs(y[static_cast<std::size_t>(k)].values[z] - mk.values[z]));
    }
    d.moment_identity = scale == 0.0 ? worst : worst / scale;
  }
  return d;
}

}  // namespace ans
