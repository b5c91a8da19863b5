#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "ans/operators.hpp"
#include "ans/series.hpp"
#include "ans/snapshot_store.hpp"

namespace ans {

enum class Side { horizontal, vertical };

/// One of the five horizontal or three vertical Duhamel terms.
struct DuhamelTermId {
  Side side = Side::horizontal;
  int index = 1;

  void validate() const;
  std::string label() const;  // "Dh1" .. "Dh5", "Dv1" .. "Dv3"
  bool operator==(const DuhamelTermId&) const = default;
};

std::vector<DuhamelTermId> all_duhamel_terms();

enum class PieceKind { heat, kernel };

/// coefficient * multiplier applied to the time-integrated product u_k u_l.
/// Heat pieces use the monomial (i xi)^alpha; kernel pieces use the kernel
/// factor of `kernel` (its time field is unused).
struct TermPiece {
  double coefficient = 1.0;
  int k = 0;
  int l = 0;
  PieceKind kind = PieceKind::heat;
  std::array<int, 3> alpha{0, 0, 0};
  KernelSymbolSpec kernel{};
};

/// Pieces of a term for output component j (0 or 1 for horizontal terms,
/// 2 for vertical ones).
std::vector<TermPiece> term_pieces(const DuhamelTermId& id, int component);
/// Sum of piece multipliers at a wave for component j and product pair (k, l).
Complex term_multiplier(const DuhamelTermId& id, int component, int k, int l, const Wave& w);
/// FNV-1a hash of the serialized term table.
std::uint64_t term_table_checksum();
/// Kernel pieces whose factor does not vanish on xi_h = 0, xi_3 != 0 modes.
std::vector<std::string> horizontal_zero_violations(const Grid& grid);

/// Spectral A_kl(t) = int_0^t e^{(t-tau)Delta_h} (u_k u_l)(tau) dtau with the
/// product frozen at its interval mean and the multiplier integrated exactly.
/// The callback sees the accumulator at every requested snapshot time.
void duhamel_sweep(const SnapshotStore& store, const std::vector<double>& targets,
                   const std::function<void(double t, const QuadraticProducts& a)>& visit);

/// Term assembled from an accumulator; spectral field with zero components
/// outside the term's side.
VelocityField assemble_term(const QuadraticProducts& accumulated, const DuhamelTermId& id);

/// Throws when t is not a snapshot time or fewer than 4 snapshots precede it.
VelocityField duhamel_term(const SnapshotStore& store, const DuhamelTermId& id, double t);

/// ||u(t) - e^{t Delta_h} u_0 - sum of terms||_p / ||u(t)||_p.
double reconstruction_residual(const SnapshotStore& store, double t, double p);
std::vector<double> reconstruction_residuals(const SnapshotStore& store,
                                             const std::vector<double>& targets, double p);

/// ||term(t)||_p at every snapshot time in [t_min, t_max]; the window must
/// span at least one decade.
DecaySeries term_decay_series(const SnapshotStore& store, const DuhamelTermId& id, double p,
                              double t_min, double t_max);
/// All eight series in one sweep.
std::vector<DecaySeries> term_decay_table(const SnapshotStore& store, double p, double t_min,
                                          double t_max);

}  // namespace ans
