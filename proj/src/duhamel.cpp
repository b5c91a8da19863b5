#include "ans/duhamel.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace ans {

void DuhamelTermId::validate() const {
  const int max_index = side == Side::horizontal ? 5 : 3;
  if (index < 1 || index > max_index)
    throw std::invalid_argument("Duhamel term index out of range");
}

std::string DuhamelTermId::label() const {
  return (side == Side::horizontal ? "Dh" : "Dv") + std::to_string(index);
}

std::vector<DuhamelTermId> all_duhamel_terms() {
  std::vector<DuhamelTermId> out;
  for (int m = 1; m <= 5; ++m) out.push_back({Side::horizontal, m});
  for (int m = 1; m <= 3; ++m) out.push_back({Side::vertical, m});
  return out;
}

namespace {

constexpr int kV = 2;  // vertical axis

std::array<int, 3> unit(int axis) {
  std::array<int, 3> a{0, 0, 0};
  a[static_cast<std::size_t>(axis)] = 1;
  return a;
}

TermPiece heat_piece(double c, int k, int l, int axis) {
  TermPiece p;
  p.coefficient = c;
  p.k = k;
  p.l = l;
  p.kind = PieceKind::heat;
  p.alpha = unit(axis);
  return p;
}

TermPiece kernel_piece(double c, int k, int l, std::array<int, 2> beta, int gamma, bool tilde) {
  TermPiece p;
  p.coefficient = c;
  p.k = k;
  p.l = l;
  p.kind = PieceKind::kernel;
  p.kernel.beta = beta;
  p.kernel.gamma = gamma;
  p.kernel.tilde = tilde;
  p.kernel.validate_shape();
  return p;
}

std::array<int, 2> beta_of(std::initializer_list<int> axes) {
  std::array<int, 2> b{0, 0};
  for (int a : axes) ++b[static_cast<std::size_t>(a)];
  return b;
}

Complex piece_multiplier(const TermPiece& p, const Wave& w) {
  const Complex m =
      p.kind == PieceKind::heat ? monomial_symbol(w, p.alpha) : kernel_factor(p.kernel, w);
  return p.coefficient * m;
}

bool vanishes_on_vertical_axis(const TermPiece& p) {
  if (p.kind == PieceKind::heat) return true;
  for (double x3 : {0.5, 1.0, 3.0}) {
    Wave w;
    w.xi = {0.0, 0.0, x3};
    w.mode = {0, 0, 1};
    if (kernel_factor(p.kernel, w) != Complex{}) return false;
  }
  return true;
}

}  // namespace

std::vector<TermPiece> term_pieces(const DuhamelTermId& id, int j) {
  id.validate();
  std::vector<TermPiece> out;
  if (id.side == Side::horizontal) {
    if (j != 0 && j != 1) throw std::invalid_argument("horizontal terms have components 0, 1");
    switch (id.index) {
      case 1:
        out.push_back(heat_piece(-1.0, kV, j, kV));
        break;
      case 2:
        for (int k = 0; k < 2; ++k) out.push_back(heat_piece(-1.0, k, j, k));
        break;
      case 3:
        out.push_back(heat_piece(1.0, kV, kV, j));
        break;
      case 4:
        for (int k = 0; k < 2; ++k)
          for (int l = 0; l < 2; ++l)
            out.push_back(kernel_piece(-1.0, k, l, beta_of({j, k, l}), 0, false));
        break;
      case 5:
        for (int k = 0; k < 2; ++k)
          out.push_back(kernel_piece(2.0, kV, k, beta_of({j, k}), 1, true));
        out.push_back(kernel_piece(-1.0, kV, kV, beta_of({j}), 2, false));
        break;
    }
  } else {
    if (j != kV) throw std::invalid_argument("vertical terms have component 2 only");
    switch (id.index) {
      case 1:
        for (int k = 0; k < 2; ++k) out.push_back(heat_piece(1.0, kV, k, k));
        break;
      case 2:
        for (int k = 0; k < 2; ++k)
          for (int l = 0; l < 2; ++l)
            out.push_back(kernel_piece(1.0, k, l, beta_of({k, l}), 1, true));
        break;
      case 3:
        for (int k = 0; k < 2; ++k)
          out.push_back(kernel_piece(-2.0, kV, k, beta_of({k}), 2, false));
        out.push_back(kernel_piece(1.0, kV, kV, beta_of({}), 3, true));
        break;
    }
  }
  return out;
}

Complex term_multiplier(const DuhamelTermId& id, int component, int k, int l, const Wave& w) {
  Complex sum{};
  for (const auto& p : term_pieces(id, component))
    if (pair_index(p.k, p.l) == pair_index(k, l)) sum += piece_multiplier(p, w);
  return sum;
}

std::uint64_t term_table_checksum() {
  std::ostringstream os;
  for (const auto& id : all_duhamel_terms()) {
    const std::vector<int> comps =
        id.side == Side::horizontal ? std::vector<int>{0, 1} : std::vector<int>{kV};
    for (int j : comps) {
      os << id.label() << ':' << j << '[';
      for (const auto& p : term_pieces(id, j)) {
        os << p.coefficient << ',' << p.k << p.l << ','
           << (p.kind == PieceKind::heat ? 'H' : 'K');
        if (p.kind == PieceKind::heat) {
          os << p.alpha[0] << p.alpha[1] << p.alpha[2];
        } else {
          os << p.kernel.beta[0] << p.kernel.beta[1] << p.kernel.gamma
             << (p.kernel.tilde ? 'T' : 'P');
        }
        os << ';';
      }
      os << ']';
    }
  }
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : os.str()) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::vector<std::string> horizontal_zero_violations(const Grid& grid) {
  (void)grid;
  std::vector<std::string> out;
  for (const auto& id : all_duhamel_terms()) {
    const std::vector<int> comps =
        id.side == Side::horizontal ? std::vector<int>{0, 1} : std::vector<int>{kV};
    for (int j : comps)
      for (const auto& p : term_pieces(id, j))
        if (!vanishes_on_vertical_axis(p)) {
          std::ostringstream os;
          os << id.label() << " component " << j << " pair (" << p.k << ',' << p.l
             << ") does not vanish at xi_h = 0";
          out.push_back(os.str());
        }
  }
  return out;
}

// ---------------------------------------------------------------------------

namespace {

std::vector<std::size_t> target_indices(const SnapshotStore& store,
                                        const std::vector<double>& targets) {
  std::vector<std::size_t> idx;
  for (double t : targets) {
    const long i = store.index_of(t);
    if (i < 0) {
      std::ostringstream os;
      os << "t = " << t << " is not a snapshot time";
      throw std::invalid_argument(os.str());
    }
    idx.push_back(static_cast<std::size_t>(i));
  }
  std::sort(idx.begin(), idx.end());
  idx.erase(std::unique(idx.begin(), idx.end()), idx.end());
  return idx;
}

QuadraticProducts zero_products(const Grid& g) {
  return {ScalarField(g, Representation::spectral), ScalarField(g, Representation::spectral),
          ScalarField(g, Representation::spectral), ScalarField(g, Representation::spectral),
          ScalarField(g, Representation::spectral), ScalarField(g, Representation::spectral)};
}

}  // namespace

void duhamel_sweep(const SnapshotStore& store, const std::vector<double>& targets,
                   const std::function<void(double, const QuadraticProducts&)>& visit) {
  if (store.empty()) throw std::invalid_argument("empty snapshot store");
  const std::vector<std::size_t> idx = target_indices(store, targets);
  if (idx.empty()) return;
  const Grid& g = store.grid();
  QuadraticProducts acc = zero_products(g);
  std::size_t next = 0;
  if (idx[next] == 0) {
    visit(store.times()[0], acc);
    ++next;
  }
  if (next == idx.size()) return;

  std::vector<double> rho2(g.spectral_size());
  g.for_each_mode([&](const Wave& w) { rho2[w.index] = w.xi_h2(); });

  QuadraticProducts prev = quadratic_products(store.at(0));
  for (std::size_t i = 1; i <= idx.back(); ++i) {
    QuadraticProducts cur = quadratic_products(store.at(i));
    const double h = store.times()[i] - store.times()[i - 1];
    for (std::size_t q = 0; q < 6; ++q) {
      auto a = acc[q].spectral();
      const auto x = prev[q].spectral();
      const auto y = cur[q].spectral();
      for (std::size_t m = 0; m < rho2.size(); ++m) {
        const double r2 = rho2[m];
        const double weight = r2 == 0.0 ? h : -std::expm1(-h * r2) / r2;
        a[m] = std::exp(-h * r2) * a[m] + weight * 0.5 * (x[m] + y[m]);
      }
    }
    prev = std::move(cur);
    if (i == idx[next]) {
      visit(store.times()[i], acc);
      ++next;
    }
  }
}

VelocityField assemble_term(const QuadraticProducts& accumulated, const DuhamelTermId& id) {
  id.validate();
  const Grid& g = accumulated[0].grid();
  VelocityField out = VelocityField::zeros(g, Representation::spectral);
  out.set_divergence_free(false);
  const std::vector<int> comps =
      id.side == Side::horizontal ? std::vector<int>{0, 1} : std::vector<int>{kV};
  for (int j : comps) {
    const std::vector<TermPiece> pieces = term_pieces(id, j);
    std::vector<bool> exclude;
    for (const auto& p : pieces) exclude.push_back(!vanishes_on_vertical_axis(p));
    auto o = out[j].spectral();
    g.for_each_mode([&](const Wave& w) {
      Complex sum{};
      for (std::size_t n = 0; n < pieces.size(); ++n) {
        if (exclude[n] && w.horizontal_zero()) continue;
        const auto& p = pieces[n];
        sum += piece_multiplier(p, w) *
               accumulated[static_cast<std::size_t>(pair_index(p.k, p.l))].spectral()[w.index];
      }
      o[w.index] = sum;
    });
  }
  return out;
}

namespace {

void require_history(const SnapshotStore& store, double t) {
  const long i = store.index_of(t);
  if (i < 0) {
    std::ostringstream os;
    os << "t = " << t << " is not a snapshot time";
    throw std::invalid_argument(os.str());
  }
  if (i > 0 && i < 4)
    throw std::invalid_argument("store too coarse: fewer than 4 snapshots before t");
}

}  // namespace

VelocityField duhamel_term(const SnapshotStore& store, const DuhamelTermId& id, double t) {
  id.validate();
  require_history(store, t);
  VelocityField out = VelocityField::zeros(store.grid(), Representation::spectral);
  duhamel_sweep(store, {t}, [&](double, const QuadraticProducts& a) {
    out = assemble_term(a, id);
  });
  return out;
}

std::vector<double> reconstruction_residuals(const SnapshotStore& store,
                                             const std::vector<double>& targets, double p) {
  for (double t : targets) require_history(store, t);
  const VelocityField u0 = to_spectral(store.at(0));
  std::vector<std::pair<double, double>> found;
  duhamel_sweep(store, targets, [&](double t, const QuadraticProducts& a) {
    if (t == store.times()[0]) {
      // Empty integral and identity semigroup.
      found.emplace_back(t, 0.0);
      return;
    }
    VelocityField recon = heat_semigroup_h(u0, t);
    for (const auto& id : all_duhamel_terms()) recon += assemble_term(a, id);
    const VelocityField& u = store.at(static_cast<std::size_t>(store.index_of(t)));
    VelocityField diff = to_physical(recon);
    diff *= -1.0;
    diff += u;
    const double denom = norm(u, NormSpec::lp(p));
    const double num = norm(diff, NormSpec::lp(p));
    found.emplace_back(t, denom == 0.0 ? num : num / denom);
  });
  std::vector<double> out;
  for (double t : targets)
    for (const auto& [tt, r] : found)
      if (std::abs(tt - t) <= 1e-9 * std::max(1.0, std::abs(t))) {
        out.push_back(r);
        break;
      }
  return out;
}

double reconstruction_residual(const SnapshotStore& store, double t, double p) {
  return reconstruction_residuals(store, {t}, p).front();
}

std::vector<DecaySeries> term_decay_table(const SnapshotStore& store, double p, double t_min,
                                          double t_max) {
  std::vector<double> targets;
  for (double t : store.times())
    if (t >= t_min * (1.0 - 1e-12) && t <= t_max * (1.0 + 1e-12)) targets.push_back(t);
  if (targets.empty() || targets.back() < 10.0 * targets.front() * (1.0 - 1e-12))
    throw std::invalid_argument("term decay window must span at least one decade");
  std::vector<DecaySeries> out;
  for (const auto& id : all_duhamel_terms()) {
    DecaySeries s;
    s.label = id.label();
    out.push_back(s);
  }
  const auto ids = all_duhamel_terms();
  duhamel_sweep(store, targets, [&](double t, const QuadraticProducts& a) {
    for (std::size_t n = 0; n < ids.size(); ++n) {
      const VelocityField term = to_physical(assemble_term(a, ids[n]));
      out[n].push(t, norm(term, NormSpec::lp(p)));
    }
  });
  return out;
}

DecaySeries term_decay_series(const SnapshotStore& store, const DuhamelTermId& id, double p,
                              double t_min, double t_max) {
  id.validate();
  const auto table = term_decay_table(store, p, t_min, t_max);
  const auto ids = all_duhamel_terms();
  for (std::size_t n = 0; n < ids.size(); ++n)
    if (ids[n] == id) return table[n];
  throw std::logic_error("unreachable");
}

}  // namespace ans
