#include "ans/grid.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "ans/fft.hpp"

namespace ans {

Grid::Grid(int n_h, int n_v, double L_h, double L_v)
    : n_h_(n_h), n_v_(n_v), L_h_(L_h), L_v_(L_v) {
  if (n_h < 4 || n_h % 2 != 0)
    throw std::invalid_argument("n_h must be even and >= 4, got " +
                                std::to_string(n_h));
  if (n_v < 4 || n_v % 2 != 0)
    throw std::invalid_argument("n_v must be even and >= 4, got " +
                                std::to_string(n_v));
  if (!(L_h > 0.0) || !(L_v > 0.0) || !std::isfinite(L_h) || !std::isfinite(L_v))
    throw std::invalid_argument("box lengths must be positive and finite");
  kh_ = 2.0 * std::numbers::pi / L_h;
  kv_ = 2.0 * std::numbers::pi / L_v;
  plans_ = std::make_shared<const detail::FftPlans>(n_h, n_v);
}

Grid make_grid(int n_h, int n_v, double L_h, double L_v) {
  return Grid(n_h, n_v, L_h, L_v);
}

std::vector<double> Grid::wavenumbers_h() const {
  std::vector<double> out(static_cast<std::size_t>(n_h_));
  for (int i = 0; i < n_h_; ++i) out[static_cast<std::size_t>(i)] = xi_h(i);
  return out;
}

std::vector<double> Grid::wavenumbers_v() const {
  std::vector<double> out(static_cast<std::size_t>(n_v_));
  for (int j = 0; j < n_v_; ++j) out[static_cast<std::size_t>(j)] = xi_v(j);
  return out;
}

// ---------------------------------------------------------------------------

ScalarField::ScalarField(Grid grid, Representation rep)
    : grid_(std::move(grid)), rep_(rep) {
  if (rep_ == Representation::physical)
    values_.assign(grid_.physical_size(), 0.0);
  else
    coeffs_.assign(grid_.spectral_size(), Complex{});
}

std::span<double> ScalarField::physical() {
  if (rep_ != Representation::physical)
    throw std::invalid_argument("field is in spectral representation");
  return values_;
}
std::span<const double> ScalarField::physical() const {
  if (rep_ != Representation::physical)
    throw std::invalid_argument("field is in spectral representation");
  return values_;
}
std::span<Complex> ScalarField::spectral() {
  if (rep_ != Representation::spectral)
    throw std::invalid_argument("field is in physical representation");
  return coeffs_;
}
std::span<const Complex> ScalarField::spectral() const {
  if (rep_ != Representation::spectral)
    throw std::invalid_argument("field is in physical representation");
  return coeffs_;
}

namespace {

void require_compatible(const ScalarField& a, const ScalarField& b) {
  if (!a.grid().same_shape(b.grid()))
    throw std::invalid_argument("fields live on different grids");
  if (a.representation() != b.representation())
    throw std::invalid_argument("fields have different representations");
}

}  // namespace

ScalarField& ScalarField::operator+=(const ScalarField& other) {
  return axpy(1.0, other);
}
ScalarField& ScalarField::operator-=(const ScalarField& other) {
  return axpy(-1.0, other);
}
ScalarField& ScalarField::operator*=(double s) {
  for (auto& v : values_) v *= s;
  for (auto& c : coeffs_) c *= s;
  return *this;
}
ScalarField& ScalarField::axpy(double a, const ScalarField& other) {
  require_compatible(*this, other);
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += a * other.values_[i];
  for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] += a * other.coeffs_[i];
  return *this;
}

ScalarField operator+(ScalarField a, const ScalarField& b) { return a += b; }
ScalarField operator-(ScalarField a, const ScalarField& b) { return a -= b; }
ScalarField operator*(double s, ScalarField a) { return a *= s; }

ScalarField transform(const ScalarField& field, Direction direction) {
  const Grid& g = field.grid();
  if (direction == Direction::forward) {
    if (!field.is_physical())
      throw std::invalid_argument("forward transform needs a physical field");
    ScalarField out(g, Representation::spectral);
    auto c = out.spectral();
    g.plans().forward(field.physical().data(), c.data());
    const double dv = g.cell_volume();
    for (auto& z : c) z *= dv;
    return out;
  }
  if (!field.is_spectral())
    throw std::invalid_argument("inverse transform needs a spectral field");
  AlignedVector<Complex> scratch(field.spectral().begin(), field.spectral().end());
  ScalarField out(g, Representation::physical);
  auto r = out.physical();
  g.plans().inverse(scratch.data(), r.data());
  const double inv_volume = 1.0 / g.box_volume();
  for (auto& v : r) v *= inv_volume;
  return out;
}

ScalarField to_spectral(const ScalarField& field) {
  return field.is_spectral() ? field : transform(field, Direction::forward);
}

ScalarField to_physical(const ScalarField& field) {
  return field.is_physical() ? field : transform(field, Direction::inverse);
}

void dealias_in_place(ScalarField& field) {
  auto c = field.spectral();
  field.grid().for_each_mode([&](const Wave& w) {
    if (!field.grid().retained(w)) c[w.index] = Complex{};
  });
}

namespace {

// Calls f(index, mirror_index) for every stored coefficient on the x3 = 0 and
// Nyquist planes, where the conjugate partner is also stored.
template <class F>
void for_each_self_conjugate_plane_pair(const Grid& g, F&& f) {
  const int n = g.n_h();
  for (int j3 : {0, g.n_v() / 2}) {
    for (int i1 = 0; i1 < n; ++i1) {
      const int m1 = (n - i1) % n;
      for (int i2 = 0; i2 < n; ++i2) {
        const int m2 = (n - i2) % n;
        f(g.spectral_index(i1, i2, j3), g.spectral_index(m1, m2, j3));
      }
    }
  }
}

}  // namespace

double conjugate_asymmetry(const ScalarField& field) {
  auto c = field.spectral();
  double worst = 0.0;
  for_each_self_conjugate_plane_pair(field.grid(), [&](std::size_t a, std::size_t b) {
    worst = std::max(worst, std::abs(c[a] - std::conj(c[b])));
  });
  return worst;
}

void symmetrize_in_place(ScalarField& field) {
  auto c = field.spectral();
  for_each_self_conjugate_plane_pair(field.grid(), [&](std::size_t a, std::size_t b) {
    if (a <= b) {
      const Complex avg = 0.5 * (c[a] + std::conj(c[b]));
      c[a] = avg;
      c[b] = std::conj(avg);
    }
  });
}

double max_abs(const ScalarField& field) {
  double m = 0.0;
  if (field.is_physical()) {
    for (double v : field.physical()) m = std::max(m, std::abs(v));
  } else {
    for (const Complex& z : field.spectral()) m = std::max(m, std::abs(z));
  }
  return m;
}

// ---------------------------------------------------------------------------

VelocityField::VelocityField(ScalarField u1, ScalarField u2, ScalarField u3,
                             bool divergence_free)
    : components_{std::move(u1), std::move(u2), std::move(u3)},
      divergence_free_(divergence_free) {
  for (int i = 1; i < 3; ++i) {
    if (!components_[0].grid().same_shape(components_[static_cast<std::size_t>(i)].grid()))
      throw std::invalid_argument("velocity components live on different grids");
    if (components_[0].representation() !=
        components_[static_cast<std::size_t>(i)].representation())
      throw std::invalid_argument("velocity components have mixed representations");
  }
}

VelocityField VelocityField::zeros(const Grid& grid, Representation rep) {
  return VelocityField(ScalarField(grid, rep), ScalarField(grid, rep),
                       ScalarField(grid, rep), true);
}

bool VelocityField::certify() {
  divergence_free_ = divergence_ratio(*this) <= kDivergenceTolerance;
  return divergence_free_;
}

VelocityField& VelocityField::operator+=(const VelocityField& other) {
  return axpy(1.0, other);
}
VelocityField& VelocityField::operator*=(double s) {
  for (auto& c : components_) c *= s;
  return *this;
}
VelocityField& VelocityField::axpy(double a, const VelocityField& other) {
  for (std::size_t i = 0; i < 3; ++i) components_[i].axpy(a, other.components_[i]);
  divergence_free_ = divergence_free_ && other.divergence_free_;
  return *this;
}

VelocityField transform(const VelocityField& field, Direction direction) {
  return VelocityField(transform(field[0], direction), transform(field[1], direction),
                       transform(field[2], direction), field.divergence_free());
}
VelocityField to_spectral(const VelocityField& field) {
  return field.representation() == Representation::spectral
             ? field
             : transform(field, Direction::forward);
}
VelocityField to_physical(const VelocityField& field) {
  return field.representation() == Representation::physical
             ? field
             : transform(field, Direction::inverse);
}

double divergence_ratio(const VelocityField& field) {
  const VelocityField s = to_spectral(field);
  const auto c1 = s[0].spectral();
  const auto c2 = s[1].spectral();
  const auto c3 = s[2].spectral();
  double div_max = 0.0;
  double amp_max = 0.0;
  field.grid().for_each_mode([&](const Wave& w) {
    const std::size_t i = w.index;
    // Nyquist components of xi are not representable for real fields.
    const double x1 = w.nyquist[0] ? 0.0 : w.xi[0];
    const double x2 = w.nyquist[1] ? 0.0 : w.xi[1];
    const double x3 = w.nyquist[2] ? 0.0 : w.xi[2];
    div_max = std::max(div_max, std::abs(x1 * c1[i] + x2 * c2[i] + x3 * c3[i]));
    amp_max = std::max({amp_max, std::abs(c1[i]), std::abs(c2[i]), std::abs(c3[i])});
  });
  return amp_max == 0.0 ? 0.0 : div_max / amp_max;
}

// ---------------------------------------------------------------------------

void NormSpec::validate() const {
  auto valid_exponent = [](double e) { return e >= 1.0 && !std::isnan(e); };
  if (!valid_exponent(p_h) || !valid_exponent(q_v))
    throw std::invalid_argument("norm exponents must lie in [1, inf]");
  if (weight_power != 0 && weight_power != 1)
    throw std::invalid_argument("weight power must be 0 or 1");
  int order = 0;
  for (int a : derivative) {
    if (a < 0) throw std::invalid_argument("negative derivative order");
    order += a;
  }
  if (order > 2) throw std::invalid_argument("derivative order above 2");
}

namespace {

ScalarField differentiate(const ScalarField& f, const std::array<int, 3>& alpha) {
  const Grid& g = f.grid();
  for (int axis = 0; axis < 3; ++axis) {
    const int n = axis < 2 ? g.n_h() : g.n_v();
    if (2 * alpha[static_cast<std::size_t>(axis)] >= n)
      throw std::invalid_argument("derivative order exceeds grid resolution");
  }
  ScalarField s = to_spectral(f);
  auto c = s.spectral();
  g.for_each_mode([&](const Wave& w) {
    Complex m{1.0, 0.0};
    for (std::size_t a = 0; a < 3; ++a) {
      if (alpha[a] == 0) continue;
      if (w.nyquist[a] && alpha[a] % 2 == 1) {
        m = 0.0;
        break;
      }
      m *= std::pow(Complex{0.0, w.xi[a]}, alpha[a]);
    }
    c[w.index] *= m;
  });
  return transform(s, Direction::inverse);
}

double accumulate(double acc, double v, double e) {
  return std::isinf(e) ? std::max(acc, v) : acc + std::pow(v, e);
}

double finish(double acc, double e, double measure) {
  return std::isinf(e) ? acc : std::pow(acc * measure, 1.0 / e);
}

}  // namespace

double norm(std::span<const ScalarField> components, const NormSpec& spec) {
  spec.validate();
  if (components.empty()) throw std::invalid_argument("no components");
  const Grid& g = components[0].grid();
  const bool differentiated =
      spec.derivative[0] + spec.derivative[1] + spec.derivative[2] > 0;

  std::vector<ScalarField> owned;
  std::vector<std::span<const double>> data;
  for (const auto& c : components) {
    if (!c.is_physical())
      throw std::invalid_argument("norm needs physical-representation input");
    if (!c.grid().same_shape(g)) throw std::invalid_argument("mixed grids in norm");
  }
  if (differentiated) {
    owned.reserve(components.size());
    for (const auto& c : components) owned.push_back(differentiate(c, spec.derivative));
    for (const auto& c : owned) data.push_back(c.physical());
  } else {
    for (const auto& c : components) data.push_back(c.physical());
  }

  const double p = spec.p_h;
  const double q = spec.q_v;
  double outer = 0.0;
  for (int i1 = 0; i1 < g.n_h(); ++i1) {
    const double x1 = g.coord_h(i1);
    for (int i2 = 0; i2 < g.n_h(); ++i2) {
      const double x2 = g.coord_h(i2);
      double inner = 0.0;
      const std::size_t base = g.physical_index(i1, i2, 0);
      for (int i3 = 0; i3 < g.n_v(); ++i3) {
        double mag2 = 0.0;
        for (const auto& d : data) mag2 += d[base + static_cast<std::size_t>(i3)] *
                                          d[base + static_cast<std::size_t>(i3)];
        inner = accumulate(inner, std::sqrt(mag2), q);
      }
      inner = finish(inner, q, g.dx_v());
      if (spec.weight_power == 1) inner *= std::hypot(x1, x2);
      outer = accumulate(outer, inner, p);
    }
  }
  return finish(outer, p, g.cell_area());
}

double norm(const ScalarField& field, const NormSpec& spec) {
  return norm(std::span<const ScalarField>(&field, 1), spec);
}

double norm(const VelocityField& field, const NormSpec& spec) {
  return norm(field.components(), spec);
}

double hs_norm(const ScalarField& field, int s) {
  if (s < 0 || s > 9) throw std::invalid_argument("Sobolev index must be in 0..9");
  const ScalarField sf = to_spectral(field);
  const Grid& g = sf.grid();
  const auto c = sf.spectral();
  double sum = 0.0;
  g.for_each_mode([&](const Wave& w) {
    const int j3 = static_cast<int>(w.index % static_cast<std::size_t>(g.spectral_nv()));
    sum += g.half_lattice_weight(j3) * std::pow(1.0 + w.xi2(), s) * std::norm(c[w.index]);
  });
  return std::sqrt(sum / g.box_volume());
}

double hs_norm(const VelocityField& field, int s) {
  double sum = 0.0;
  for (const auto& c : field.components()) {
    const double v = hs_norm(c, s);
    sum += v * v;
  }
  return std::sqrt(sum);
}

double inner_product(const ScalarField& a, const ScalarField& b) {
  require_compatible(a, b);
  const auto x = a.physical();
  const auto y = b.physical();
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
  return s * a.grid().cell_volume();
}

}  // namespace ans
