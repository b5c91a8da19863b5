#pragma once

#include <array>
#include <functional>
#include <span>
#include <vector>

#include "ans/grid.hpp"

namespace ans {

/// Multiplies every stored coefficient by symbol(wave). Accepts either
/// representation and returns a spectral field.
template <class Symbol>
ScalarField apply_multiplier(const ScalarField& field, Symbol&& symbol) {
  ScalarField out = to_spectral(field);
  auto c = out.spectral();
  out.grid().for_each_mode([&](const Wave& w) { c[w.index] *= symbol(w); });
  return out;
}

/// (i xi)^alpha, zero when an axis with odd power sits on its Nyquist index.
Complex monomial_symbol(const Wave& w, const std::array<int, 3>& alpha);

/// Spectral derivative; output has the input's representation.
ScalarField derivative(const ScalarField& field, const std::array<int, 3>& alpha);

/// e^{t Delta_h}: multiplies by e^{-t|xi_h|^2}. Throws for t < 0. Output has
/// the input's representation.
ScalarField heat_semigroup_h(const ScalarField& field, double t);
VelocityField heat_semigroup_h(const VelocityField& field, double t);

/// u_hat - xi (xi . u_hat)/|xi|^2, xi = 0 untouched. The result is certified
/// divergence-free and keeps the input's representation.
VelocityField helmholtz_project(const VelocityField& field);

/// grad_h^beta (-Delta_h)^{gamma/2} partial^alpha K(t), optionally with the
/// sgn(x3) twist. The twisted kernels are evaluated through
/// sgn(x3)(-Delta_h)^{1/2} K = -partial_3 K, so gamma must then be odd.
struct KernelSymbolSpec {
  std::array<int, 2> beta{0, 0};
  int gamma = 0;
  bool tilde = false;
  std::array<int, 3> alpha{0, 0, 0};
  double t = 0.0;

  int order() const { return beta[0] + beta[1] + gamma; }
  /// Checks everything except the time.
  void validate_shape() const;
  /// validate_shape() plus t > 0.
  void validate() const;
};

/// Symbol without the heat factor e^{-t|xi_h|^2}; zero at xi = 0.
Complex kernel_factor(const KernelSymbolSpec& spec, const Wave& w);
Complex kernel_symbol(const KernelSymbolSpec& spec, const Wave& w);
/// Same symbol at an arbitrary wavevector (no Nyquist handling).
Complex kernel_symbol(const KernelSymbolSpec& spec, const std::array<double, 3>& xi);

ScalarField apply_kernel(const KernelSymbolSpec& spec, const ScalarField& field);

/// K(t, x) as a continuum integral: (1/4pi) int_0^inf J0(rho r)
/// e^{-t rho^2 - rho|x3|} drho, with r = |x_h|.
double kernel_physical(double t, double r, double x3);
/// Independent evaluation of K as int_0^inf G_h(t+s, r) G_v(s, x3) ds.
double kernel_time_integral(double t, double r, double x3);

enum class GaussianKind { horizontal, vertical };

struct GaussianSpec {
  GaussianKind kind = GaussianKind::horizontal;
  double t = 1.0;
  void validate() const;
};

/// G_h(t, x_h) = (4 pi t)^{-1} e^{-|x_h|^2/4t}.
double gaussian_h(double t, double x1, double x2);
/// G_v(t, x3) = (4 pi t)^{-1/2} e^{-x3^2/4t}.
double gaussian_v(double t, double x3);

/// Evaluates at (x1, x2, x3) points; the horizontal kernel ignores x3 and the
/// vertical one ignores x1, x2.
std::vector<double> gaussian_eval(const GaussianSpec& spec,
                                  std::span<const std::array<double, 3>> points);

/// Closed form of || |x_h|^m partial^{alpha_h} G_h(t) ||_{L^p(R^2)} for
/// m in {0, 1} and |alpha_h| <= 1 (a single partial derivative).
double gaussian_h_norm(double t, double p, int m, int derivative_order);
/// Exponent of t in the norm above: -(1-1/p) - |alpha_h|/2 + m/2.
double gaussian_h_norm_exponent(double p, int m, int derivative_order);

/// partial^{alpha_h} G_h(t, x_h) sampled on the grid, constant in x3.
ScalarField gaussian_h_field(const Grid& grid, double t, std::array<int, 2> alpha_h = {0, 0});

/// Dealiased spectral products u_k u_l for k <= l, indexed by pair_index.
using QuadraticProducts = std::array<ScalarField, 6>;
constexpr int pair_index(int k, int l) {
  if (k > l) {
    const int tmp = k;
    k = l;
    l = tmp;
  }
  return k == 0 ? l : (k == 1 ? 2 + l : 5);
}
/// When max_speed is given it receives max |u| of the dealiased field.
QuadraticProducts quadratic_products(const VelocityField& u, double* max_speed = nullptr);

/// Pressure with zero-mean gauge: p_hat = -sum xi_k xi_l/|xi|^2 (u_k u_l)^.
/// Throws for uncertified input. Returns a physical field.
ScalarField pressure_recover(const VelocityField& u);

}  // namespace ans
