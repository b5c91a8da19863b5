#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <cstdlib>
#include <limits>
#include <memory>
#include <new>
#include <span>
#include <vector>

namespace ans {

/// 64-byte aligned storage so FFT plans can use aligned SIMD kernels.
template <class T>
struct AlignedAllocator {
  using value_type = T;
  static constexpr std::size_t kAlignment = 64;

  AlignedAllocator() = default;
  template <class U>
  AlignedAllocator(const AlignedAllocator<U>&) noexcept {}

  T* allocate(std::size_t n) {
    const std::size_t bytes = (n * sizeof(T) + kAlignment - 1) / kAlignment * kAlignment;
    void* p = std::aligned_alloc(kAlignment, bytes == 0 ? kAlignment : bytes);
    if (p == nullptr) throw std::bad_alloc();
    return static_cast<T*>(p);
  }
  void deallocate(T* p, std::size_t) noexcept { std::free(p); }

  template <class U>
  bool operator==(const AlignedAllocator<U>&) const noexcept { return true; }
};

template <class T>
using AlignedVector = std::vector<T, AlignedAllocator<T>>;

using Complex = std::complex<double>;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

namespace detail {
class FftPlans;
}

/// One point of the spectral lattice as seen by multiplier sweeps.
struct Wave {
  std::size_t index = 0;
  std::array<int, 3> mode{};      // signed lattice index per axis
  std::array<double, 3> xi{};     // wavenumber per axis
  std::array<bool, 3> nyquist{};  // axis sits on its Nyquist index

  /// Wavenumber to use in odd-power factors: zero on a Nyquist axis.
  double xi_odd(int axis) const {
    const auto a = static_cast<std::size_t>(axis);
    return nyquist[a] ? 0.0 : xi[a];
  }
  double xi_h2() const { return xi[0] * xi[0] + xi[1] * xi[1]; }
  double xi2() const { return xi_h2() + xi[2] * xi[2]; }
  bool horizontal_zero() const { return mode[0] == 0 && mode[1] == 0; }
  bool zero() const { return horizontal_zero() && mode[2] == 0; }
};

/// Periodic box [-L_h/2, L_h/2)^2 x [-L_v/2, L_v/2) sampled on n_h x n_h x n_v
/// points, with x3 the fastest-varying index.
///
/// Spectral storage is the real-to-complex half lattice: the x3 axis keeps
/// indices 0..n_v/2 and the conjugate half is implied. Coefficients refer to
/// the lattice origin at the first grid point, so they carry the phase of the
/// box offset; every multiplier in this project is translation invariant and
/// does not see it.
class Grid {
 public:
  Grid(int n_h, int n_v, double L_h, double L_v);

  int n_h() const { return n_h_; }
  int n_v() const { return n_v_; }
  double L_h() const { return L_h_; }
  double L_v() const { return L_v_; }
  double dx_h() const { return L_h_ / n_h_; }
  double dx_v() const { return L_v_ / n_v_; }
  double cell_area() const { return dx_h() * dx_h(); }
  double cell_volume() const { return dx_h() * dx_h() * dx_v(); }
  double box_volume() const { return L_h_ * L_h_ * L_v_; }

  std::size_t physical_size() const {
    return static_cast<std::size_t>(n_h_) * n_h_ * n_v_;
  }
  int spectral_nv() const { return n_v_ / 2 + 1; }
  std::size_t spectral_size() const {
    return static_cast<std::size_t>(n_h_) * n_h_ * spectral_nv();
  }
  std::size_t physical_index(int i1, int i2, int i3) const {
    return (static_cast<std::size_t>(i1) * n_h_ + i2) * n_v_ + i3;
  }
  std::size_t spectral_index(int i1, int i2, int j3) const {
    return (static_cast<std::size_t>(i1) * n_h_ + i2) * spectral_nv() + j3;
  }

  /// Box-centered coordinate of grid index i; the center is index n/2.
  double coord_h(int i) const { return -0.5 * L_h_ + i * dx_h(); }
  double coord_v(int i) const { return -0.5 * L_v_ + i * dx_v(); }

  /// Signed lattice index of FFT index i, in [-n/2, n/2).
  int mode_h(int i) const { return i < n_h_ / 2 ? i : i - n_h_; }
  int mode_v(int j) const { return j < n_v_ / 2 ? j : j - n_v_; }
  double xi_h(int i) const { return kh_ * mode_h(i); }
  double xi_v(int j) const { return kv_ * mode_v(j); }
  double dxi_h() const { return kh_; }
  double dxi_v() const { return kv_; }

  /// Full wavenumber lattices in FFT order.
  std::vector<double> wavenumbers_h() const;
  std::vector<double> wavenumbers_v() const;

  /// Largest retained |mode| under the two-thirds rule (strictly below n/3).
  int dealias_cutoff_h() const { return (n_h_ - 1) / 3; }
  int dealias_cutoff_v() const { return (n_v_ - 1) / 3; }
  bool retained(const Wave& w) const {
    return std::abs(w.mode[0]) <= dealias_cutoff_h() &&
           std::abs(w.mode[1]) <= dealias_cutoff_h() &&
           std::abs(w.mode[2]) <= dealias_cutoff_v();
  }

  /// Visits every stored spectral coefficient in storage order.
  template <class F>
  void for_each_mode(F&& f) const {
    Wave w;
    const int nz = spectral_nv();
    for (int i1 = 0; i1 < n_h_; ++i1) {
      w.mode[0] = mode_h(i1);
      w.xi[0] = kh_ * w.mode[0];
      w.nyquist[0] = (2 * i1 == n_h_);
      for (int i2 = 0; i2 < n_h_; ++i2) {
        w.mode[1] = mode_h(i2);
        w.xi[1] = kh_ * w.mode[1];
        w.nyquist[1] = (2 * i2 == n_h_);
        for (int j3 = 0; j3 < nz; ++j3) {
          w.mode[2] = mode_v(j3);
          w.xi[2] = kv_ * w.mode[2];
          w.nyquist[2] = (2 * j3 == n_v_);
          w.index = spectral_index(i1, i2, j3);
          f(static_cast<const Wave&>(w));
        }
      }
    }
  }

  /// Multiplicity of a stored coefficient in the full (conjugate-completed)
  /// lattice: 1 on the x3 = 0 and Nyquist planes, 2 elsewhere.
  double half_lattice_weight(int j3) const {
    return (j3 == 0 || 2 * j3 == n_v_) ? 1.0 : 2.0;
  }

  bool same_shape(const Grid& other) const {
    return n_h_ == other.n_h_ && n_v_ == other.n_v_ && L_h_ == other.L_h_ &&
           L_v_ == other.L_v_;
  }

  const detail::FftPlans& plans() const { return *plans_; }

 private:
  int n_h_;
  int n_v_;
  double L_h_;
  double L_v_;
  double kh_;
  double kv_;
  std::shared_ptr<const detail::FftPlans> plans_;
};

/// Validating constructor; throws std::invalid_argument on odd or tiny
/// resolutions and non-positive lengths.
Grid make_grid(int n_h, int n_v, double L_h, double L_v);

enum class Representation { physical, spectral };
enum class Direction { forward, inverse };

/// Real scalar field held either as grid samples or as half-lattice
/// coefficients. Forward transforms are Riemann sums of the continuous
/// transform (sum times cell volume); the inverse divides by the box volume.
class ScalarField {
 public:
  ScalarField(Grid grid, Representation rep);

  static ScalarField zeros(const Grid& grid, Representation rep) {
    return ScalarField(grid, rep);
  }
  template <class F>
  static ScalarField sample(const Grid& grid, F&& f) {
    ScalarField out(grid, Representation::physical);
    auto data = out.physical();
    for (int i1 = 0; i1 < grid.n_h(); ++i1)
      for (int i2 = 0; i2 < grid.n_h(); ++i2)
        for (int i3 = 0; i3 < grid.n_v(); ++i3)
          data[grid.physical_index(i1, i2, i3)] =
              f(grid.coord_h(i1), grid.coord_h(i2), grid.coord_v(i3));
    return out;
  }

  const Grid& grid() const { return grid_; }
  Representation representation() const { return rep_; }
  bool is_physical() const { return rep_ == Representation::physical; }
  bool is_spectral() const { return rep_ == Representation::spectral; }

  std::span<double> physical();
  std::span<const double> physical() const;
  std::span<Complex> spectral();
  std::span<const Complex> spectral() const;

  ScalarField& operator+=(const ScalarField& other);
  ScalarField& operator-=(const ScalarField& other);
  ScalarField& operator*=(double s);
  /// this += a * other
  ScalarField& axpy(double a, const ScalarField& other);

 private:
  Grid grid_;
  Representation rep_;
  AlignedVector<double> values_;
  AlignedVector<Complex> coeffs_;
};

ScalarField operator+(ScalarField a, const ScalarField& b);
ScalarField operator-(ScalarField a, const ScalarField& b);
ScalarField operator*(double s, ScalarField a);

/// Throws std::invalid_argument when the representation does not match the
/// requested direction.
ScalarField transform(const ScalarField& field, Direction direction);
ScalarField to_spectral(const ScalarField& field);
ScalarField to_physical(const ScalarField& field);

/// Zeroes every mode outside the two-thirds cube. Spectral input only.
void dealias_in_place(ScalarField& field);

/// Largest |Im| a conjugate-asymmetric coefficient set would inject; the
/// stored x3 = 0 and Nyquist planes are the only places that can break it.
double conjugate_asymmetry(const ScalarField& field);
void symmetrize_in_place(ScalarField& field);

double max_abs(const ScalarField& field);

class VelocityField {
 public:
  VelocityField(ScalarField u1, ScalarField u2, ScalarField u3,
                bool divergence_free = false);

  static VelocityField zeros(const Grid& grid, Representation rep);

  const Grid& grid() const { return components_[0].grid(); }
  Representation representation() const {
    return components_[0].representation();
  }
  ScalarField& operator[](int i) { return components_[static_cast<std::size_t>(i)]; }
  const ScalarField& operator[](int i) const {
    return components_[static_cast<std::size_t>(i)];
  }
  std::span<const ScalarField, 3> components() const { return components_; }

  bool divergence_free() const { return divergence_free_; }
  /// Recomputes the certificate from the spectral divergence; returns it.
  bool certify();
  void set_divergence_free(bool flag) { divergence_free_ = flag; }

  VelocityField& operator+=(const VelocityField& other);
  VelocityField& operator*=(double s);
  VelocityField& axpy(double a, const VelocityField& other);

 private:
  std::array<ScalarField, 3> components_;
  bool divergence_free_ = false;
};

inline constexpr double kDivergenceTolerance = 1e-10;

VelocityField transform(const VelocityField& field, Direction direction);
VelocityField to_spectral(const VelocityField& field);
VelocityField to_physical(const VelocityField& field);

/// max over modes |xi . u_hat| / max over modes |u_hat| (0 for the zero field).
double divergence_ratio(const VelocityField& field);

/// Mixed Lebesgue norm request: inner q_v over x3, outer p_h over x_h,
/// optional weight |x_h|^m and a spectral derivative applied first.
struct NormSpec {
  double p_h = 2.0;
  double q_v = 2.0;
  int weight_power = 0;
  std::array<int, 3> derivative{0, 0, 0};

  static NormSpec lp(double p) { return NormSpec{p, p, 0, {0, 0, 0}}; }
  static NormSpec mixed(double p, double q, int m = 0) {
    return NormSpec{p, q, m, {0, 0, 0}};
  }
  NormSpec with_derivative(std::array<int, 3> alpha) const {
    NormSpec out = *this;
    out.derivative = alpha;
    return out;
  }
  void validate() const;
};

/// Norm of a physical field. Infinite exponents are grid maxima.
double norm(const ScalarField& field, const NormSpec& spec);
/// Norm of the pointwise Euclidean magnitude of several components.
double norm(std::span<const ScalarField> components, const NormSpec& spec);
double norm(const VelocityField& field, const NormSpec& spec);

/// Spectral H^s norm, s in 0..9; accepts either representation.
double hs_norm(const ScalarField& field, int s);
double hs_norm(const VelocityField& field, int s);

/// L2 inner product by quadrature on physical fields.
double inner_product(const ScalarField& a, const ScalarField& b);

}  // namespace ans
