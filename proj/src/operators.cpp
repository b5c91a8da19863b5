#include "ans/operators.hpp"

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace ans {

namespace {

constexpr double kPi = std::numbers::pi;

Complex i_power(int n) {
  switch (((n % 4) + 4) % 4) {
    case 0: return {1.0, 0.0};
    case 1: return {0.0, 1.0};
    case 2: return {-1.0, 0.0};
    default: return {0.0, -1.0};
  }
}

double int_power(double x, int n) {
  double r = 1.0;
  for (int k = 0; k < n; ++k) r *= x;
  return r;
}

// |xi_h|^gamma without pow() so even powers stay exact.
double horizontal_magnitude_power(double xi_h2, int gamma) {
  double r = int_power(xi_h2, gamma / 2);
  if (gamma % 2 == 1) r *= std::sqrt(xi_h2);
  return r;
}

ScalarField keep_representation(ScalarField spectral, Representation rep) {
  return rep == Representation::physical ? to_physical(spectral) : spectral;
}

}  // namespace

Complex monomial_symbol(const Wave& w, const std::array<int, 3>& alpha) {
  double mag = 1.0;
  int total = 0;
  for (int a = 0; a < 3; ++a) {
    const int n = alpha[static_cast<std::size_t>(a)];
    if (n == 0) continue;
    if (n % 2 == 1 && w.nyquist[static_cast<std::size_t>(a)]) return {};
    mag *= int_power(w.xi[static_cast<std::size_t>(a)], n);
    total += n;
  }
  return i_power(total) * mag;
}

ScalarField derivative(const ScalarField& field, const std::array<int, 3>& alpha) {
  for (int a : alpha)
    if (a < 0) throw std::invalid_argument("negative derivative order");
  ScalarField out =
      apply_multiplier(field, [&](const Wave& w) { return monomial_symbol(w, alpha); });
  return keep_representation(std::move(out), field.representation());
}

ScalarField heat_semigroup_h(const ScalarField& field, double t) {
  if (!(t >= 0.0)) throw std::invalid_argument("heat semigroup needs t >= 0");
  ScalarField out = apply_multiplier(
      field, [t](const Wave& w) { return Complex{std::exp(-t * w.xi_h2()), 0.0}; });
  return keep_representation(std::move(out), field.representation());
}

VelocityField heat_semigroup_h(const VelocityField& field, double t) {
  return VelocityField(heat_semigroup_h(field[0], t), heat_semigroup_h(field[1], t),
                       heat_semigroup_h(field[2], t), field.divergence_free());
}

VelocityField helmholtz_project(const VelocityField& field) {
  VelocityField s = to_spectral(field);
  auto c1 = s[0].spectral();
  auto c2 = s[1].spectral();
  auto c3 = s[2].spectral();
  s.grid().for_each_mode([&](const Wave& w) {
    const double k1 = w.xi_odd(0);
    const double k2 = w.xi_odd(1);
    const double k3 = w.xi_odd(2);
    const double k2sum = k1 * k1 + k2 * k2 + k3 * k3;
    if (k2sum == 0.0) return;
    const std::size_t i = w.index;
    const Complex d = (k1 * c1[i] + k2 * c2[i] + k3 * c3[i]) / k2sum;
    c1[i] -= k1 * d;
    c2[i] -= k2 * d;
    c3[i] -= k3 * d;
  });
  for (int k = 0; k < 3; ++k) symmetrize_in_place(s[k]);
  s.set_divergence_free(true);
  if (field.representation() == Representation::physical) {
    VelocityField p = to_physical(s);
    p.set_divergence_free(true);
    return p;
  }
  return s;
}

// ---------------------------------------------------------------------------

void KernelSymbolSpec::validate_shape() const {
  if (beta[0] < 0 || beta[1] < 0 || gamma < 0)
    throw std::invalid_argument("kernel indices must be nonnegative");
  for (int a : alpha)
    if (a < 0) throw std::invalid_argument("kernel derivative must be nonnegative");
  if (tilde && gamma % 2 == 0)
    throw std::invalid_argument("sgn(x3)-twisted kernel needs odd gamma");
  if (order() > 4) throw std::invalid_argument("|beta| + gamma must not exceed 4");
}

void KernelSymbolSpec::validate() const {
  validate_shape();
  if (!(t > 0.0)) throw std::invalid_argument("kernel time must be positive");
}

namespace {

Complex kernel_factor_impl(const KernelSymbolSpec& spec, const std::array<double, 3>& xi,
                           const std::array<bool, 3>& nyquist) {
  const double xi_h2 = xi[0] * xi[0] + xi[1] * xi[1];
  const double xi2 = xi_h2 + xi[2] * xi[2];
  if (xi2 == 0.0) return {};
  const std::array<int, 3> powers{spec.beta[0] + spec.alpha[0],
                                  spec.beta[1] + spec.alpha[1],
                                  spec.alpha[2] + (spec.tilde ? 1 : 0)};
  double mag = 1.0;
  int total = 0;
  for (std::size_t a = 0; a < 3; ++a) {
    if (powers[a] % 2 == 1 && nyquist[a]) return {};
    mag *= int_power(xi[a], powers[a]);
    total += powers[a];
  }
  mag *= horizontal_magnitude_power(xi_h2, spec.tilde ? spec.gamma - 1 : spec.gamma);
  mag /= xi2;
  if (spec.tilde) mag = -mag;
  return i_power(total) * mag;
}

}  // namespace

Complex kernel_factor(const KernelSymbolSpec& spec, const Wave& w) {
  return kernel_factor_impl(spec, w.xi, w.nyquist);
}

Complex kernel_symbol(const KernelSymbolSpec& spec, const Wave& w) {
  spec.validate();
  return kernel_factor(spec, w) * std::exp(-spec.t * w.xi_h2());
}

Complex kernel_symbol(const KernelSymbolSpec& spec, const std::array<double, 3>& xi) {
  spec.validate();
  const double xi_h2 = xi[0] * xi[0] + xi[1] * xi[1];
  return kernel_factor_impl(spec, xi, {false, false, false}) * std::exp(-spec.t * xi_h2);
}

ScalarField apply_kernel(const KernelSymbolSpec& spec, const ScalarField& field) {
  spec.validate();
  ScalarField out = apply_multiplier(field, [&](const Wave& w) {
    return kernel_factor(spec, w) * std::exp(-spec.t * w.xi_h2());
  });
  return keep_representation(std::move(out), field.representation());
}

double kernel_physical(double t, double r, double x3) {
  if (!(t > 0.0)) throw std::invalid_argument("kernel time must be positive");
  const double z = std::abs(x3);
  // e^{-t rho^2} < 1e-18 beyond this point.
  const double rho_max = std::sqrt(18.0 * std::log(10.0) / t);
  auto f = [=](double rho) {
    return std::cyl_bessel_j(0.0, rho * r) * std::exp(-t * rho * rho - rho * z);
  };
  const double value =
      boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, 0.0, rho_max, 20, 1e-14);
  return value / (4.0 * kPi);
}

double kernel_time_integral(double t, double r, double x3) {
  if (!(t > 0.0)) throw std::invalid_argument("kernel time must be positive");
  // s = u^2 removes the s^{-1/2} endpoint singularity of G_v.
  auto f = [=](double u) {
    const double s = u * u;
    const double gv = x3 == 0.0 ? 1.0 : std::exp(-x3 * x3 / (4.0 * s));
    return 2.0 * gaussian_h(t + s, r, 0.0) * gv / std::sqrt(4.0 * kPi);
  };
  boost::math::quadrature::exp_sinh<double> integrator;
  return integrator.integrate(f, 1e-14);
}

// ---------------------------------------------------------------------------

void GaussianSpec::validate() const {
  if (!(t > 0.0)) throw std::invalid_argument("Gaussian time must be positive");
}

double gaussian_h(double t, double x1, double x2) {
  return std::exp(-(x1 * x1 + x2 * x2) / (4.0 * t)) / (4.0 * kPi * t);
}

double gaussian_v(double t, double x3) {
  return std::exp(-x3 * x3 / (4.0 * t)) / std::sqrt(4.0 * kPi * t);
}

std::vector<double> gaussian_eval(const GaussianSpec& spec,
                                  std::span<const std::array<double, 3>> points) {
  spec.validate();
  std::vector<double> out;
  out.reserve(points.size());
  for (const auto& x : points)
    out.push_back(spec.kind == GaussianKind::horizontal ? gaussian_h(spec.t, x[0], x[1])
                                                        : gaussian_v(spec.t, x[2]));
  return out;
}

double gaussian_h_norm(double t, double p, int m, int derivative_order) {
  if (!(t > 0.0)) throw std::invalid_argument("Gaussian time must be positive");
  if (m != 0 && m != 1) throw std::invalid_argument("weight power must be 0 or 1");
  if (derivative_order != 0 && derivative_order != 1)
    throw std::invalid_argument("derivative order must be 0 or 1");
  if (!(p >= 1.0)) throw std::invalid_argument("exponent must lie in [1, inf]");
  const int a = derivative_order;
  const int k = m + a;
  const double prefactor = 1.0 / (4.0 * kPi * t) / std::pow(2.0 * t, a);
  if (std::isinf(p)) {
    if (k == 0) return prefactor;
    return prefactor * std::pow(2.0 * t * k, 0.5 * k) * std::exp(-0.5 * k);
  }
  const double angular =
      a == 0 ? 2.0 * kPi
             : 2.0 * std::sqrt(kPi) * std::tgamma(0.5 * (p + 1.0)) / std::tgamma(0.5 * p + 1.0);
  const double e = 0.5 * (k * p + 2.0);
  const double radial = std::tgamma(e) / (2.0 * std::pow(p / (4.0 * t), e));
  return prefactor * std::pow(angular * radial, 1.0 / p);
}

double gaussian_h_norm_exponent(double p, int m, int derivative_order) {
  const double inv_p = std::isinf(p) ? 0.0 : 1.0 / p;
  return -(1.0 - inv_p) - 0.5 * derivative_order + 0.5 * m;
}

ScalarField gaussian_h_field(const Grid& grid, double t, std::array<int, 2> alpha_h) {
  if (!(t > 0.0)) throw std::invalid_argument("Gaussian time must be positive");
  if (alpha_h[0] < 0 || alpha_h[1] < 0 || alpha_h[0] + alpha_h[1] > 1)
    throw std::invalid_argument("Gaussian derivative order must be at most 1");
  return ScalarField::sample(grid, [&](double x1, double x2, double) {
    double g = gaussian_h(t, x1, x2);
    if (alpha_h[0] == 1) g *= -x1 / (2.0 * t);
    if (alpha_h[1] == 1) g *= -x2 / (2.0 * t);
    return g;
  });
}

// ---------------------------------------------------------------------------

QuadraticProducts quadratic_products(const VelocityField& u, double* max_speed) {
  const Grid& g = u.grid();
  std::array<ScalarField, 3> phys{ScalarField(g, Representation::physical),
                                  ScalarField(g, Representation::physical),
                                  ScalarField(g, Representation::physical)};
  for (int k = 0; k < 3; ++k) {
    ScalarField s = to_spectral(u[k]);
    dealias_in_place(s);
    phys[static_cast<std::size_t>(k)] = to_physical(s);
  }
  if (max_speed != nullptr) {
    const auto a = phys[0].physical();
    const auto b = phys[1].physical();
    const auto c = phys[2].physical();
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
      m = std::max(m, a[i] * a[i] + b[i] * b[i] + c[i] * c[i]);
    *max_speed = std::sqrt(m);
  }
  QuadraticProducts out{ScalarField(g, Representation::spectral),
                        ScalarField(g, Representation::spectral),
                        ScalarField(g, Representation::spectral),
                        ScalarField(g, Representation::spectral),
                        ScalarField(g, Representation::spectral),
                        ScalarField(g, Representation::spectral)};
  ScalarField prod(g, Representation::physical);
  for (int k = 0; k < 3; ++k) {
    for (int l = k; l < 3; ++l) {
      auto a = phys[static_cast<std::size_t>(k)].physical();
      auto b = phys[static_cast<std::size_t>(l)].physical();
      auto p = prod.physical();
      for (std::size_t i = 0; i < p.size(); ++i) p[i] = a[i] * b[i];
      ScalarField s = to_spectral(prod);
      dealias_in_place(s);
      out[static_cast<std::size_t>(pair_index(k, l))] = std::move(s);
    }
  }
  return out;
}

ScalarField pressure_recover(const VelocityField& u) {
  if (!u.divergence_free())
    throw std::invalid_argument("pressure recovery needs a divergence-free field");
  const QuadraticProducts prod = quadratic_products(u);
  const Grid& g = u.grid();
  ScalarField p(g, Representation::spectral);
  auto out = p.spectral();
  g.for_each_mode([&](const Wave& w) {
    const std::array<double, 3> k{w.xi_odd(0), w.xi_odd(1), w.xi_odd(2)};
    const double k2 = k[0] * k[0] + k[1] * k[1] + k[2] * k[2];
    if (k2 == 0.0) return;
    Complex acc{};
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b)
        acc += k[static_cast<std::size_t>(a)] * k[static_cast<std::size_t>(b)] *
               prod[static_cast<std::size_t>(pair_index(a, b))].spectral()[w.index];
    out[w.index] = -acc / k2;
  });
  return to_physical(p);
}

}  // namespace ans
