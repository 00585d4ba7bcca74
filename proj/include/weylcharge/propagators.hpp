#pragma once
// Pauli-Jordan pairings.  All conventions derive from one sign choice,
// pinned by three calibration identities (checked by `check` and the tests):
//   (a) Re pair_Dplus(f, f) <= 0  (two-point positivity),
//   (b) d/dt D(t, x)|_{t=0} = +delta^3(x), i.e. D(x) = (1/2pi) eps(x0) delta(x^2),
//   (c) the Gauss readout of a unit charge in the FixedInside geometry is +Q.
//
//   pair_Dplus(f, g) = 2 pi INT d^3p / (2 omega)  conj(f~)_mu g~^mu
//   pair_D(f, g)     = -kDSign * 2 Im pair_Dplus(f, g)
//   D_flat           = D_r * D_r - D_a * D_a, kernel (kDSign/8pi) eps(u0) theta(u^2)
//
// Pairings are evaluated atom-pairwise / nodewise on fixed grids, so they are
// exactly bilinear in the atom lists (normal-form phase bookkeeping relies on
// this).

#include <cmath>
#include <map>
#include <vector>

#include "shell.hpp"

namespace weylcharge {

inline constexpr double kDSign = 1.0;

namespace detail {

// Minkowski contraction on stored covariant components (plain product for
// scalars): conj(a)_mu b^mu = conj(a0) b0 - sum_j conj(aj) bj.
inline cplx contract(const MassShellAmplitude& A, const MassShellAmplitude& B,
                     std::size_t node) {
  if (A.ncomp == 1) return std::conj(A.at(node, 0)) * B.at(node, 0);
  cplx s = std::conj(A.at(node, 0)) * B.at(node, 0);
  for (int j = 1; j < 4; ++j) s -= std::conj(A.at(node, j)) * B.at(node, j);
  return s;
}

}  // namespace detail

inline cplx pair_dplus_amp(const MassShellAmplitude& A,
                           const MassShellAmplitude& B) {
  if (A.grid != B.grid || A.ncomp != B.ncomp)
    throw std::invalid_argument("amplitude grid/rank mismatch in pairing");
  const auto& ns = A.grid->nodes();
  KahanSum re, im;
  for (std::size_t i = 0; i < ns.size(); ++i) {
    cplx c = detail::contract(A, B, i) * (ns[i].w * 0.5 * ns[i].r);
    re.add(c.real());
    im.add(c.imag());
  }
  return 2.0 * M_PI * cplx(re.value(), im.value());
}

inline double pair_d_amp(const MassShellAmplitude& A,
                         const MassShellAmplitude& B) {
  return -kDSign * 2.0 * pair_dplus_amp(A, B).imag();
}

inline cplx pair_dplus(const TestFn& f, const TestFn& g,
                       const std::shared_ptr<const ShellGrid>& grid) {
  return pair_dplus_amp(*amplitude(f, grid), *amplitude(g, grid));
}

// <f, D g> with the vector (Minkowski) contraction.
inline double pair_d(const TestFn& f, const TestFn& g,
                     const std::shared_ptr<const ShellGrid>& grid) {
  return pair_d_amp(*amplitude(f, grid), *amplitude(g, grid));
}

// INT f (D g) d^4x for scalar f, g (positive-definite contraction).
inline double pair_d_scalar(const TestFn& f, const TestFn& g,
                            const std::shared_ptr<const ShellGrid>& grid) {
  if (f.rank() != Rank::Scalar || g.rank() != Rank::Scalar)
    throw std::invalid_argument("pair_d_scalar expects scalar functions");
  return pair_d(f, g, grid);
}

// INT (D s)(x) rho(x) d^4x, the gauge phase integral.
inline double pair_ds_rho(const TestFn& s, const TestFn& rho,
                          const std::shared_ptr<const ShellGrid>& grid) {
  return pair_d_scalar(rho, s, grid);
}

// Quadrature error estimate: re-evaluate on a coarsened grid.
inline double pair_d_error_estimate(
    const TestFn& f, const TestFn& g,
    const std::shared_ptr<const ShellGrid>& grid) {
  QuadratureSpec s = grid->spec();
  s.radial_panels = std::max(1, s.radial_panels / 2);
  s.n_theta = std::max(4, s.n_theta - 4);
  s.n_phi = std::max(4, s.n_phi - 2 * ((s.n_phi / 2) % 2 ? 1 : 2));
  if (s.n_phi % 2) ++s.n_phi;
  auto coarse = ShellGrid::get(s);
  return std::abs(pair_d(f, g, grid) - pair_d(f, g, coarse));
}

// ---------------------------------------------------------------------------
// D_flat pairing in position space.  <a, D_flat b> is computed once per
// unordered pair of atom shapes (translation-invariant, unit-coefficient) and
// antisymmetrized by construction, so pair_dflat is exactly antisymmetric and
// exactly bilinear in the atom lists.

namespace detail {

// Per-panel polynomial cumulative of a smooth function (used for the time
// correlation antiderivative).
class PolyCumulative {
 public:
  template <class F>
  PolyCumulative(const F& f, double lo, double hi, int panels = 40,
                 int order = 8)
      : lo_(lo), hi_(hi), panels_(panels), order_(order) {
    const auto& rule = gauss_legendre(order);
    h_ = (hi - lo) / panels;
    coef_.resize(panels);
    prefix_.assign(panels + 1, 0.0);
    for (int p = 0; p < panels; ++p) {
      std::vector<double> vals(order);
      for (int i = 0; i < order; ++i)
        vals[i] = f(lo + p * h_ + 0.5 * h_ * (1.0 + rule.nodes[i]));
      coef_[p] = fit(rule.nodes, vals);
      // exact integral of the fitted polynomial over [-1, 1], scaled
      double acc = 0.0;
      for (int k = 0; k < order; ++k)
        if (k % 2 == 0) acc += coef_[p][k] * 2.0 / (k + 1);
      prefix_[p + 1] = prefix_[p] + acc * 0.5 * h_;
    }
  }

  // INT_{lo}^{t} f
  double operator()(double t) const {
    if (t <= lo_) return 0.0;
    if (t >= hi_) return prefix_[panels_];
    int p = std::min(panels_ - 1, static_cast<int>((t - lo_) / h_));
    double u = 2.0 * (t - (lo_ + p * h_)) / h_ - 1.0;
    double acc = 0.0;
    for (int k = 0; k < order_; ++k) {
      double a = (std::pow(u, k + 1) - std::pow(-1.0, k + 1)) / (k + 1);
      acc += coef_[p][k] * a;
    }
    return prefix_[p] + acc * 0.5 * h_;
  }

  double total() const { return prefix_[panels_]; }

 private:
  static std::vector<double> fit(const std::vector<double>& nodes,
                                 std::vector<double> vals) {
    // Solve the Vandermonde system for monomial coefficients on [-1, 1].
    int n = static_cast<int>(nodes.size());
    std::vector<std::vector<double>> m(n, std::vector<double>(n + 1));
    for (int i = 0; i < n; ++i) {
      double x = 1.0;
      for (int k = 0; k < n; ++k) {
        m[i][k] = x;
        x *= nodes[i];
      }
      m[i][n] = vals[i];
    }
    for (int c = 0; c < n; ++c) {
      int piv = c;
      for (int r = c + 1; r < n; ++r)
        if (std::abs(m[r][c]) > std::abs(m[piv][c])) piv = r;
      std::swap(m[c], m[piv]);
      for (int r = 0; r < n; ++r) {
        if (r == c) continue;
        double fct = m[r][c] / m[c][c];
        for (int k = c; k <= n; ++k) m[r][k] -= fct * m[c][k];
      }
    }
    std::vector<double> out(n);
    for (int k = 0; k < n; ++k) out[k] = m[k][n] / m[k][k];
    return out;
  }

  double lo_, hi_, h_;
  int panels_, order_;
  std::vector<std::vector<double>> coef_;
  std::vector<double> prefix_;
};

inline void encode_factor(const Factor& f, std::vector<double>& key) {
  key.push_back(f.kind == Factor::Kind::Bump ? 0.0 : 1.0);
  key.push_back(f.pow);
  key.push_back(f.inv_pow);
  key.push_back(f.edge);
}

inline std::vector<double> dflat_shape_key(const Atom& a, const Atom& b) {
  std::vector<double> key;
  for (int i = 0; i < 4; ++i) {
    encode_factor(a.factors[i], key);
    key.push_back(a.width[i]);
  }
  for (int i = 0; i < 4; ++i) {
    encode_factor(b.factors[i], key);
    key.push_back(b.width[i]);
  }
  for (int i = 0; i < 4; ++i) key.push_back(b.center[i] - a.center[i]);
  return key;
}

// <a, D_flat b> for unit coefficients.
inline double dflat_atoms_raw(const Atom& a, const Atom& b) {
  // Per-axis correlations C_i(u) = INT fa_i(x) fb_i(x - u) dx.
  auto corr = [&](int axis, double u) {
    return axis_overlap_integral(a.factors[axis], a.center[axis],
                                 a.width[axis], b.factors[axis],
                                 b.center[axis] + u, b.width[axis]);
  };
  std::array<double, 4> lo, hi;  // support of C_i
  for (int i = 0; i < 4; ++i) {
    lo[i] = (a.center[i] - a.width[i]) - (b.center[i] + b.width[i]);
    hi[i] = (a.center[i] + a.width[i]) - (b.center[i] - b.width[i]);
  }
  PolyCumulative F0([&](double t) { return corr(0, t); }, lo[0], hi[0]);

  // Spatial nodes: per axis, Gauss-Legendre panels split at u = 0 to keep
  // the |u| kink at a panel boundary.
  const int order = 12;
  const auto& rule = gauss_legendre(order);
  std::array<std::vector<std::pair<double, double>>, 3> axes;  // (u, w * C_i)
  for (int i = 0; i < 3; ++i) {
    std::vector<std::pair<double, double>> seg;
    double l = lo[i + 1], h = hi[i + 1];
    std::vector<std::pair<double, double>> panels;
    if (l < 0.0 && h > 0.0)
      panels = {{l, 0.0}, {0.0, h}};
    else
      panels = {{l, h}};
    for (auto [pl, ph] : panels)
      for (int k = 0; k < order; ++k) {
        double u = 0.5 * (pl + ph) + 0.5 * (ph - pl) * rule.nodes[k];
        double w = 0.5 * (ph - pl) * rule.weights[k];
        seg.emplace_back(u, w * corr(i + 1, u));
      }
    axes[i] = std::move(seg);
  }

  KahanSum total;
  for (const auto& [u1, w1] : axes[0])
    for (const auto& [u2, w2] : axes[1])
      for (const auto& [u3, w3] : axes[2]) {
        double ws = w1 * w2 * w3;
        if (ws == 0.0) continue;
        double rr = std::sqrt(u1 * u1 + u2 * u2 + u3 * u3);
        // INT_{t > rr} C0 - INT_{t < -rr} C0
        double plus = F0.total() - F0(rr);
        double minus = F0(-rr);
        total.add(ws * (plus - minus));
      }
  return kDSign / (8.0 * M_PI) * total.value();
}

}  // namespace detail

// Global cache of shape-key -> kernel value; exposed so batch runs can
// persist it across processes (see the cache-directory option of the CLI).
inline std::map<std::vector<double>, double>& dflat_cache() {
  static std::map<std::vector<double>, double> cache;
  return cache;
}

// <rho1, D_flat rho2> for scalar densities; exactly antisymmetric.
inline double pair_dflat(const TestFn& rho1, const TestFn& rho2) {
  if (rho1.rank() != Rank::Scalar || rho2.rank() != Rank::Scalar)
    throw std::invalid_argument("pair_dflat expects scalar functions");
  auto& cache = dflat_cache();
  KahanSum s;
  for (const auto& [c1, a] : rho1.atoms())
    for (const auto& [c2, b] : rho2.atoms()) {
      auto kab = detail::dflat_shape_key(a, b);
      auto kba = detail::dflat_shape_key(b, a);
      double sign = 1.0;
      const std::vector<double>* key = &kab;
      const Atom *first = &a, *second = &b;
      if (kba < kab) {
        sign = -1.0;
        key = &kba;
        first = &b;
        second = &a;
      } else if (kba == kab) {
        continue;  // antisymmetric self-pairing vanishes identically
      }
      auto it = cache.find(*key);
      if (it == cache.end()) {
        Atom ua = *first, ub = *second;
        ua.coef = 1.0;
        ub.coef = 1.0;
        it = cache.emplace(*key, detail::dflat_atoms_raw(ua, ub)).first;
      }
      s.add(sign * a.coef * b.coef * it->second);
    }
  return s.value();
}

}  // namespace weylcharge
