#include "ans/solver.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "ans/operators.hpp"

namespace ans {

void SolverConfig::validate() const {
  if (!(dt > 0.0)) throw std::invalid_argument("dt must be positive");
  if (!(t_end >= dt)) throw std::invalid_argument("t_end must be at least dt");
  if (!(cfl_safety > 0.0 && cfl_safety <= 1.0))
    throw std::invalid_argument("cfl_safety must lie in (0, 1]");
  if (!(tail_threshold > 0.0)) throw std::invalid_argument("tail threshold must be positive");
  if (dt_head < 0.0) throw std::invalid_argument("dt_head must be nonnegative");
  if (dt_head > 0.0 && !(head_end > 0.0)) throw std::invalid_argument("head_end must be positive");
}

// ---------------------------------------------------------------------------

void EnergyLedger::record(double t, const VelocityField& u) {
  if (!times_.empty() && !(t > times_.back()))
    throw std::invalid_argument("ledger times must increase strictly");
  const VelocityField s = to_spectral(u);
  const Grid& g = s.grid();
  std::array<double, 3> nsq{};
  std::array<double, 3> rate{};
  for (int k = 0; k < 3; ++k) {
    const auto c = s[k].spectral();
    g.for_each_mode([&](const Wave& w) {
      const int j3 = static_cast<int>(w.index % static_cast<std::size_t>(g.spectral_nv()));
      const double e = g.half_lattice_weight(j3) * std::norm(c[w.index]);
      double weight = 1.0;
      for (std::size_t sigma = 0; sigma < 3; ++sigma) {
        nsq[sigma] += weight * e;
        rate[sigma] += weight * w.xi_h2() * e;
        weight *= 1.0 + w.xi2();
      }
    });
  }
  for (std::size_t sigma = 0; sigma < 3; ++sigma) {
    nsq[sigma] /= g.box_volume();
    rate[sigma] /= g.box_volume();
    if (!std::isfinite(nsq[sigma]) || !std::isfinite(rate[sigma]))
      throw std::runtime_error("non-finite energy at t = " + std::to_string(t));
    double cumulative = 0.0;
    if (!times_.empty()) {
      const double h = t - times_.back();
      cumulative = dissipation_[sigma].back() + 0.5 * h * (rate_[sigma].back() + rate[sigma]);
    }
    norm_sq_[sigma].push_back(nsq[sigma]);
    rate_[sigma].push_back(rate[sigma]);
    dissipation_[sigma].push_back(cumulative);
  }
  times_.push_back(t);
}

std::vector<double> EnergyLedger::kinetic() const {
  std::vector<double> out(norm_sq_[0].size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = 0.5 * norm_sq_[0][i];
  return out;
}

double EnergyLedger::max_relative_drift() const {
  if (times_.empty()) return 0.0;
  const double e0 = 0.5 * norm_sq_[0].front();
  if (e0 == 0.0) return 0.0;
  double worst = 0.0;
  for (std::size_t i = 0; i < times_.size(); ++i)
    worst = std::max(worst, std::abs(0.5 * norm_sq_[0][i] - e0 + dissipation_[0][i]) / e0);
  return worst;
}

double EnergyLedger::max_inequality_ratio(int sigma) const {
  const auto s = static_cast<std::size_t>(sigma);
  if (times_.empty() || norm_sq_.at(s).front() == 0.0) return 0.0;
  const double bound = 2.0 * norm_sq_[s].front();
  double worst = 0.0;
  for (std::size_t i = 0; i < times_.size(); ++i)
    worst = std::max(worst, (norm_sq_[s][i] + 2.0 * dissipation_[s][i]) / bound);
  return worst;
}

// ---------------------------------------------------------------------------

namespace {

struct Rhs {
  VelocityField value;
  double max_speed;
};

Rhs nonlinear_rhs_impl(const VelocityField& u, bool want_speed) {
  const Grid& g = u.grid();
  double speed = 0.0;
  const QuadraticProducts prod = quadratic_products(u, want_speed ? &speed : nullptr);
  VelocityField out = VelocityField::zeros(g, Representation::spectral);
  std::array<std::span<Complex>, 3> o{out[0].spectral(), out[1].spectral(), out[2].spectral()};
  std::array<std::span<const Complex>, 6> p;
  for (std::size_t q = 0; q < 6; ++q) p[q] = prod[q].spectral();
  g.for_each_mode([&](const Wave& w) {
    const std::array<double, 3> k{w.xi_odd(0), w.xi_odd(1), w.xi_odd(2)};
    for (int j = 0; j < 3; ++j) {
      Complex div{};
      for (int l = 0; l < 3; ++l)
        div += k[static_cast<std::size_t>(l)] *
               p[static_cast<std::size_t>(pair_index(j, l))][w.index];
      o[static_cast<std::size_t>(j)][w.index] = Complex{div.imag(), -div.real()};
    }
  });
  out.set_divergence_free(true);
  return {helmholtz_project(out), speed};
}

// e^{-s|xi_h|^2} per stored coefficient.
std::vector<double> heat_factors(const Grid& g, double s) {
  std::vector<double> f(g.spectral_size());
  g.for_each_mode([&](const Wave& w) { f[w.index] = std::exp(-s * w.xi_h2()); });
  return f;
}

VelocityField apply_factors(const VelocityField& u, const std::vector<double>& f) {
  VelocityField out = u;
  for (int k = 0; k < 3; ++k) {
    auto c = out[k].spectral();
    for (std::size_t i = 0; i < c.size(); ++i) c[i] *= f[i];
  }
  return out;
}

}  // namespace

VelocityField nonlinear_rhs(const VelocityField& u) {
  if (!u.divergence_free())
    throw std::invalid_argument("nonlinear term needs a divergence-free field");
  return nonlinear_rhs_impl(to_spectral(u), false).value;
}

VelocityField step(const VelocityField& u, double dt, const SolverConfig& config) {
  if (!(dt > 0.0)) throw std::invalid_argument("step size must be positive");
  if (!u.divergence_free())
    throw std::invalid_argument("step needs a divergence-free field");
  const VelocityField u0 = to_spectral(u);
  const Grid& g = u0.grid();
  const std::vector<double> e_full = heat_factors(g, dt);
  if (config.linear_only) {
    VelocityField out = apply_factors(u0, e_full);
    out.set_divergence_free(true);
    return out;
  }
  const std::vector<double> e_half = heat_factors(g, 0.5 * dt);
  const double half = 0.5 * dt;

  Rhs r1 = nonlinear_rhs_impl(u0, true);
  const double dx = std::min(g.dx_h(), g.dx_v());
  if (r1.max_speed > 0.0 && dt > config.cfl_safety * dx / r1.max_speed) {
    std::ostringstream os;
    os << "CFL violation: dt = " << dt << " exceeds " << config.cfl_safety << " * "
       << dx << " / max|u| with max|u| = " << r1.max_speed;
    throw std::runtime_error(os.str());
  }
  const VelocityField& k1 = r1.value;

  // k2 = N(E(h/2)(u + h/2 k1)), k3 = N(E(h/2)u + h/2 k2),
  // k4 = N(E(h)u + h E(h/2) k3).
  VelocityField s2 = u0;
  s2.axpy(half, k1);
  const VelocityField k2 = nonlinear_rhs_impl(apply_factors(s2, e_half), false).value;

  const VelocityField eu_half = apply_factors(u0, e_half);
  VelocityField s3 = eu_half;
  s3.axpy(half, k2);
  const VelocityField k3 = nonlinear_rhs_impl(s3, false).value;

  const VelocityField eu_full = apply_factors(u0, e_full);
  VelocityField s4 = eu_full;
  s4.axpy(dt, apply_factors(k3, e_half));
  const VelocityField k4 = nonlinear_rhs_impl(s4, false).value;

  VelocityField mid = k2;
  mid += k3;
  VelocityField out = eu_full;
  out.axpy(dt / 6.0, apply_factors(k1, e_full));
  out.axpy(dt / 3.0, apply_factors(mid, e_half));
  out.axpy(dt / 6.0, k4);
  return helmholtz_project(out);
}

double vertical_tail_fraction(const VelocityField& u) {
  const VelocityField s = to_spectral(u);
  const Grid& g = s.grid();
  const double threshold = 2.0 * g.dealias_cutoff_v() / 3.0;
  double total = 0.0;
  double tail = 0.0;
  for (int k = 0; k < 3; ++k) {
    const auto c = s[k].spectral();
    g.for_each_mode([&](const Wave& w) {
      if (!g.retained(w)) return;
      const int j3 = static_cast<int>(w.index % static_cast<std::size_t>(g.spectral_nv()));
      const double e = g.half_lattice_weight(j3) * std::norm(c[w.index]);
      total += e;
      if (std::abs(w.mode[2]) > threshold) tail += e;
    });
  }
  return total == 0.0 ? 0.0 : tail / total;
}

namespace {

bool all_finite(const VelocityField& u) {
  for (const auto& c : u.components())
    for (const Complex& z : c.spectral())
      if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
  return true;
}

}  // namespace

RunResult run(const VelocityField& u0, const SolverConfig& config,
              const std::vector<double>& snapshot_times, const std::string& schedule) {
  config.validate();
  if (!u0.divergence_free())
    throw std::invalid_argument("initial data must be certified divergence-free");
  if (snapshot_times.empty() || snapshot_times.front() != 0.0)
    throw std::invalid_argument("snapshot schedule must start at t = 0");
  for (std::size_t i = 1; i < snapshot_times.size(); ++i)
    if (!(snapshot_times[i] > snapshot_times[i - 1]))
      throw std::invalid_argument("snapshot times must increase strictly");

  RunResult result{SnapshotStore(u0.grid(), schedule), EnergyLedger{}, {}};
  VelocityField u = to_spectral(u0);
  u.set_divergence_free(true);
  double t = 0.0;
  result.store.append(0.0, u);
  result.ledger.record(0.0, u);

  auto monitor_tail = [&](double time) {
    const double frac = vertical_tail_fraction(u);
    if (frac > config.tail_threshold) {
      std::ostringstream os;
      os << "vertical spectral tail fraction " << frac << " exceeds "
         << config.tail_threshold << " at t = " << time;
      result.warnings.push_back(os.str());
    }
  };
  monitor_tail(0.0);

  for (std::size_t next = 1; next < snapshot_times.size(); ++next) {
    const double target = snapshot_times[next];
    while (t < target) {
      double h = config.step_at(t);
      if (config.dt_head > 0.0 && t < config.head_end && t + h > config.head_end)
        h = config.head_end - t;
      bool hit = false;
      if (t + h >= target - 1e-9 * h) {
        h = target - t;
        hit = true;
      }
      u = step(u, h, config);
      t = hit ? target : t + h;
      if (!all_finite(u)) {
        std::ostringstream os;
        os << "non-finite values at t = " << t;
        throw std::runtime_error(os.str());
      }
      result.ledger.record(t, u);
    }
    result.store.append(t, u);
    monitor_tail(t);
  }
  return result;
}

RunResult run(const VelocityField& u0, const SolverConfig& config,
              const SnapshotSchedule& schedule) {
  return run(u0, config, schedule.times(), schedule.describe());
}

}  // namespace ans
