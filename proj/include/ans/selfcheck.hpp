#pragma once

#include <vector>

#include "ans/experiment.hpp"
#include "ans/solver.hpp"

namespace ans {

/// Kernel identities d3d3 K = -e^{t Delta_h} - Delta_h K and
/// d3d3d3 K = -e^{t Delta_h} d3 - sgn(x3)(-Delta_h)^{3/2} K at every nonzero
/// lattice mode, projection idempotence and annihilation of gradients, and
/// semigroup composition.
std::vector<CheckRow> multiplier_identity_checks();

/// Hankel-transform evaluation of K(t) against the time integral of
/// G_h(t+s) G_v(s) for t in {0.5, 1, 4}.
std::vector<CheckRow> kernel_oracle_checks();

/// L1 and L2 norms of G_h, and the discrete scaling of the weighted and
/// differentiated Gaussian norms.
std::vector<CheckRow> gaussian_norm_checks();

/// fit_rate on noiseless synthetic power laws.
std::vector<CheckRow> fit_checks();

}  // namespace ans

namespace ans {

/// Global temporal order of the solver from dt-halving against a fine
/// reference: O(1) random solenoidal data on a 16^3 periodic box, horizon 1.
/// Returns the order measured between the two finest step sizes.
double temporal_order(std::vector<double>* errors = nullptr);

/// log2 of the ratio of one-step Richardson defects |S(dt) - S(dt/2)S(dt/2)|
/// at dt = 0.025 and 0.0125 (5 for a fourth-order one-step method).
double local_order();

}  // namespace ans
