#pragma once
// One-dimensional factor calculus.  Every test function on R^4 is a finite
// sum of atoms, each a product of four axis factors.  Two factor kinds:
//
//   Bump(k, q):   u^k (1 - u^2)^{-q} exp(-1/(1 - u^2))  on (-1, 1)
//   Plateau(e):   smoothed box: normalized bump antiderivative edges of
//                 relative width e at each end, identically 1 in between.
//
// The family is closed under differentiation: d/du of a Bump stays in the
// family (q -> q + 2), and d/du of a Plateau is a pair of edge bumps.

#include <cmath>
#include <cstdint>
#include <map>
#include <memory>
#include <tuple>

#include "quad1d.hpp"

namespace weylcharge {

inline double bump_base(double u) {
  double s = 1.0 - u * u;
  if (s <= 0.0) return 0.0;
  return std::exp(-1.0 / s);
}

// INT_{-1}^{1} exp(-1/(1-u^2)) du, the edge-normalization constant.
inline double bump_mass() {
  static const double v =
      integrate_adaptive<double>([](double u) { return bump_base(u); }, -1.0,
                                 1.0, 1e-14);
  return v;
}

// Normalized antiderivative S(v) = INT_{-1}^{v} b / INT_{-1}^{1} b.
inline double bump_cdf(double v) {
  if (v <= -1.0) return 0.0;
  if (v >= 1.0) return 1.0;
  constexpr int N = 256;
  static std::vector<double> cum = [] {
    std::vector<double> c(N + 1, 0.0);
    const auto& rule = gauss_legendre(8);
    double h = 2.0 / N;
    for (int p = 0; p < N; ++p) {
      double lo = -1.0 + p * h, mid = lo + 0.5 * h, acc = 0.0;
      for (std::size_t i = 0; i < rule.nodes.size(); ++i)
        acc += rule.weights[i] * bump_base(mid + 0.5 * h * rule.nodes[i]);
      c[p + 1] = c[p] + acc * 0.5 * h;
    }
    return c;
  }();
  double h = 2.0 / N;
  int p = std::min(N - 1, static_cast<int>((v + 1.0) / h));
  double lo = -1.0 + p * h;
  const auto& rule = gauss_legendre(8);
  double mid = 0.5 * (lo + v), acc = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i)
    acc += rule.weights[i] * bump_base(mid + 0.5 * (v - lo) * rule.nodes[i]);
  return (cum[p] + acc * 0.5 * (v - lo)) / cum[N];
}

struct Factor {
  enum class Kind : std::uint8_t { Bump, Plateau };
  Kind kind = Kind::Bump;
  int pow = 0;        // monomial power k (Bump only)
  int inv_pow = 0;    // pole order q (Bump only)
  double edge = 0.0;  // relative edge width e in (0, 1] (Plateau only)

  double operator()(double u) const {
    if (kind == Kind::Bump) {
      double s = 1.0 - u * u;
      if (s <= 0.0) return 0.0;
      double v = std::exp(-1.0 / s);
      if (v == 0.0) return 0.0;
      if (inv_pow) v *= std::pow(s, -inv_pow);
      if (pow) v *= std::pow(u, pow);
      return v;
    }
    double au = std::abs(u);
    if (au >= 1.0) return 0.0;
    if (au <= 1.0 - edge) return 1.0;
    double h = 0.5 * edge;
    return bump_cdf((1.0 - au) / h - 1.0);
  }

  bool operator==(const Factor& o) const {
    return kind == o.kind && pow == o.pow && inv_pow == o.inv_pow &&
           edge == o.edge;
  }
  bool operator<(const Factor& o) const {
    return std::tie(kind, pow, inv_pow, edge) <
           std::tie(o.kind, o.pow, o.inv_pow, o.edge);
  }
};

// G(alpha) = INT_{-1}^{1} F(u) e^{i alpha u} du for a real factor F, so
// G(-alpha) = conj G(alpha).  Tabulated by Chebyshev panels and cached per
// factor shape; an atom's axis transform is w e^{i a c} G(w a).
inline cplx axis_transform(const Factor& f, double alpha) {
  static std::map<Factor, std::unique_ptr<ChebPanelInterp>> cache;
  auto it = cache.find(f);
  if (it == cache.end()) {
    Factor fc = f;
    auto fn = [fc](double a) -> cplx {
      auto integrand = [&](double u) -> cplx {
        return fc(u) * std::exp(cplx(0.0, a * u));
      };
      int init = std::max(2, static_cast<int>(std::abs(a) / 3.0) + 1);
      if (fc.kind == Factor::Kind::Plateau) {
        // split at the edge joints where the integrand loses smoothness
        double j = 1.0 - fc.edge;
        return integrate_adaptive<cplx>(integrand, -1.0, -j, 1e-11, 1.0,
                                        init) +
               integrate_adaptive<cplx>(integrand, -j, j, 1e-11, 1.0, init) +
               integrate_adaptive<cplx>(integrand, j, 1.0, 1e-11, 1.0, init);
      }
      return integrate_adaptive<cplx>(integrand, -1.0, 1.0, 1e-11, 1.0, init);
    };
    it = cache
             .emplace(f, std::make_unique<ChebPanelInterp>(std::move(fn),
                                                           2.0, 24))
             .first;
  }
  return (*it->second)(alpha);
}

}  // namespace weylcharge
