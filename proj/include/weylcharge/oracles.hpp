#pragma once
// Independent position-space routes to the propagator pairings, used to
// calibrate the momentum-space implementation:
//   (D g)(x)  = (kDSign/4pi) INT d^3z/|z| [g(x0-|z|, x-z) - g(x0+|z|, x-z)]
//   (D_r g)(x) = (kDSign/4pi) INT d^3z/|z| g(x0-|z|, x-z),  D_r box g = g
// These are light-cone integrals evaluated by direct quadrature; they share
// no code with the mass-shell route.

#include <cmath>

#include "propagators.hpp"

namespace weylcharge {

struct ConeQuadrature {
  int radial_panels = 4;
  int radial_order = 10;
  int n_mu = 8;
  int n_phi = 8;
};

namespace detail {

template <class G>
double cone_integral(const G& g, const Vec4& x, double rmax, bool retarded,
                     bool advanced, const ConeQuadrature& cq) {
  const auto& rad = gauss_legendre(cq.radial_order);
  const auto& ang = gauss_legendre(cq.n_mu);
  double wphi = 2.0 * M_PI / cq.n_phi;
  double h = rmax / cq.radial_panels;
  KahanSum s;
  for (int pan = 0; pan < cq.radial_panels; ++pan)
    for (int ir = 0; ir < cq.radial_order; ++ir) {
      double r = pan * h + 0.5 * h * (1.0 + rad.nodes[ir]);
      double wr = 0.5 * h * rad.weights[ir] * r;  // d^3z/|z| = r dr dOmega
      for (int im = 0; im < cq.n_mu; ++im) {
        double mu = ang.nodes[im], smu = std::sqrt(1.0 - mu * mu);
        for (int ip = 0; ip < cq.n_phi; ++ip) {
          double phi = wphi * ip;
          Vec4 z{0.0, r * smu * std::cos(phi), r * smu * std::sin(phi),
                 r * mu};
          double val = 0.0;
          if (retarded)
            val += g(Vec4{x[0] - r, x[1] - z[1], x[2] - z[2], x[3] - z[3]});
          if (advanced)
            val -= g(Vec4{x[0] + r, x[1] - z[1], x[2] - z[2], x[3] - z[3]});
          s.add(wr * ang.weights[im] * wphi * val);
        }
      }
    }
  return kDSign / (4.0 * M_PI) * s.value();
}

}  // namespace detail

// Pointwise (D g)(x) for a scalar TestFn, light-cone route.
inline double apply_d_position(const TestFn& g, const Vec4& x,
                               const ConeQuadrature& cq = {}) {
  // Both terms need x0 -+ r inside the time support of g.
  Box4 sb = g.support().bounding_box();
  double rmax =
      std::max(std::abs(x[0] - sb.lo[0]), std::abs(x[0] - sb.hi[0]));
  if (rmax <= 0.0) return 0.0;
  auto ev = [&](const Vec4& y) { return g.eval_scalar(y); };
  return detail::cone_integral(ev, x, rmax, true, true, cq);
}

// Pointwise retarded solution (D_r g)(x); (D_r box g)(x) = g(x).
inline double apply_dr_position(const TestFn& g, const Vec4& x,
                                const ConeQuadrature& cq = {}) {
  // The retarded term needs x0 - r inside the time support of g.
  Box4 sb = g.support().bounding_box();
  double rmax = x[0] - sb.lo[0];
  if (rmax <= 0.0) return 0.0;
  auto ev = [&](const Vec4& y) { return g.eval_scalar(y); };
  return detail::cone_integral(ev, x, rmax, true, false, cq);
}

// <f, D g> for scalar f, g by direct 4-d quadrature over supp f of the
// light-cone integral.  Independent oracle for pair_d_scalar.
inline double pair_d_scalar_position(const TestFn& f, const TestFn& g,
                                     int box_order = 8,
                                     const ConeQuadrature& cq = {}) {
  const auto& rule = gauss_legendre(box_order);
  KahanSum s;
  for (const auto& [c, af] : f.atoms()) {
    Box4 b = af.box();
    std::array<std::vector<std::pair<double, double>>, 4> ax;
    for (int i = 0; i < 4; ++i)
      for (int k = 0; k < box_order; ++k) {
        double mid = 0.5 * (b.lo[i] + b.hi[i]);
        double half = 0.5 * (b.hi[i] - b.lo[i]);
        ax[i].emplace_back(mid + half * rule.nodes[k], half * rule.weights[k]);
      }
    for (auto [x0, w0] : ax[0])
      for (auto [x1, w1] : ax[1])
        for (auto [x2, w2] : ax[2])
          for (auto [x3, w3] : ax[3]) {
            Vec4 x{x0, x1, x2, x3};
            double fx = af.eval(x);
            if (fx == 0.0) continue;
            s.add(w0 * w1 * w2 * w3 * fx * apply_d_position(g, x, cq));
          }
  }
  return s.value();
}

// <f, D g> for vector f, g (Minkowski contraction of stored components).
inline double pair_d_position(const TestFn& f, const TestFn& g,
                              int box_order = 8,
                              const ConeQuadrature& cq = {}) {
  if (f.rank() != Rank::Vector || g.rank() != Rank::Vector)
    throw std::invalid_argument("pair_d_position expects vector functions");
  KahanSum total;
  for (int c = 0; c < 4; ++c) {
    std::vector<std::pair<int, Atom>> fa, ga;
    for (const auto& [cc, a] : f.atoms())
      if (cc == c) fa.emplace_back(0, a);
    for (const auto& [cc, a] : g.atoms())
      if (cc == c) ga.emplace_back(0, a);
    if (fa.empty() || ga.empty()) continue;
    double sign = (c == 0) ? 1.0 : -1.0;
    total.add(sign *
              pair_d_scalar_position(TestFn(Rank::Scalar, std::move(fa)),
                                     TestFn(Rank::Scalar, std::move(ga)),
                                     box_order, cq));
  }
  return total.value();
}

}  // namespace weylcharge
