#pragma once

#include <array>
#include <string>
#include <utility>
#include <vector>

#include "ans/grid.hpp"
#include "ans/series.hpp"
#include "ans/snapshot_store.hpp"

namespace ans {

/// Per-height samples of a horizontal integral, one value per x3 grid point.
struct VerticalProfile {
  std::string tag;
  std::vector<double> values;
  /// Attached uncertainty (L1 over x3) for truncated time integrals.
  double tail_estimate = 0.0;

  double max_abs() const;
  double l1(double dx_v) const;
};

/// Riemann sum of f over the horizontal plane at every x3.
VerticalProfile horizontal_mass(const ScalarField& f);
/// Riemann sums of (y1 f, y2 f) with y measured from the box center.
std::array<VerticalProfile, 2> horizontal_first_moment(const ScalarField& f);

enum class CorrectionKind {
  horizontal,               // int_0^T int d3(u3 u_h) dy_h dtau
  vertical_second_order,    // int_0^T int (u3 u_h) dy_h dtau
};

struct NonlinearCorrection {
  std::array<VerticalProfile, 2> profiles;
  /// ||integrand(tau)||_{L1} at every snapshot used.
  DecaySeries integrand_l1;
  /// Power-law fit of the integrand tail and the resulting estimate of
  /// int_T^inf ||integrand||_{L1}.
  RateFit tail_fit;
  double tail_estimate = 0.0;
  double t_max = 0.0;
  std::vector<std::string> warnings;
};

/// Trapezoid in tau over the snapshots with time <= t_max (default: all).
NonlinearCorrection nonlinear_correction(const SnapshotStore& store, CorrectionKind kind,
                                         double t_max = -1.0);

enum class Expansion {
  uh_leading,
  u3_leading,
  u3_second_order,
  uh_leading_linear,
  u3_leading_linear,
  u3_second_order_linear,
};

std::string expansion_label(Expansion e);
bool is_linear(Expansion e);
/// Power of t that makes the remainder tend to zero.
double expansion_scale_power(Expansion e, double p);

/// Everything the profiles need: masses and moments of the data plus the
/// time-integrated nonlinear corrections.
struct Profiles {
  std::array<VerticalProfile, 3> mass;
  std::array<VerticalProfile, 2> moment3;
  bool has_corrections = false;
  NonlinearCorrection correction_h;
  NonlinearCorrection correction_v;
};

Profiles linear_profiles(const VelocityField& u0);
Profiles compute_profiles(const SnapshotStore& store);

/// Remainder norm series at every snapshot time in [t_min, t_max]. The linear
/// variants evolve the stored initial data with the heat semigroup instead of
/// reading later snapshots. Throws when a nonlinear expansion is requested
/// without corrections.
DecaySeries remainder_series(const SnapshotStore& store, const Profiles& profiles,
                             Expansion expansion, double p, double t_min = 0.0,
                             double t_max = 1e300);

/// e^{t Delta_h} f minus its first m + 1 profile terms (m in {0, 1}):
/// G_h M(f) and, for m = 1, - grad_h G_h . Y(f).
ScalarField linear_profile_remainder(const ScalarField& f, double t, int m);

/// Tensor product (partial^{alpha_h} G_h(t))(x_h) * profile(x3) on the grid.
ScalarField profile_field(const Grid& grid, double t, std::array<int, 2> alpha_h,
                          const VerticalProfile& profile);

/// Mixed and weighted norm series over the store plus the linear
/// enhanced-dissipation norms of the third component.
std::vector<DecaySeries> diagnostic_norms(
    const SnapshotStore& store,
    const std::vector<std::pair<double, double>>& enhanced_exponents = {{2.0, 2.0},
                                                                       {kInf, kInf}});

/// Relative defects of the divergence-free structural identities for data u0:
/// d3 of the u3 mass, d3 e^{t Delta_h} u3 + div_h e^{t Delta_h} u_h at t, and
/// the first-moment identity for k = 1, 2.
struct StructuralDefects {
  double mass_derivative = 0.0;
  double semigroup_divergence = 0.0;
  double moment_identity = 0.0;
};
StructuralDefects structural_defects(const VelocityField& u0, double t = 1.0);

}  // namespace ans
