#pragma once
// Mass-shell quadrature grids and amplitudes.  A grid discretizes
// d^3p = r^2 dr dmu dphi with composite Gauss-Legendre panels in r on
// [0, p_max], Gauss-Legendre in mu = cos(theta), and a uniform (trapezoid)
// rule in phi; node weights store dr dmu dphi so callers attach the measure
// factor they need (r^2, r/2, ...).  An amplitude is the restriction of a
// Fourier transform to the positive mass shell p = (r, pvec), |pvec| = r.

#include <cmath>
#include <cstdint>
#include <map>
#include <memory>
#include <tuple>
#include <vector>

#include "quad1d.hpp"
#include "testfn.hpp"

namespace weylcharge {

struct QuadratureSpec {
  double p_max = 20.0;
  int radial_panels = 6;
  int radial_order = 12;
  int n_theta = 12;
  int n_phi = 12;  // must be even so that p -> -p maps nodes to nodes

  std::tuple<double, int, int, int, int> key() const {
    return {p_max, radial_panels, radial_order, n_theta, n_phi};
  }
};

// Default cutoff: 40 / (smallest axis width over the functions in play).
inline double default_p_max(double smallest_width) {
  return 40.0 / smallest_width;
}

class ShellGrid {
 public:
  struct Node {
    double r;        // |pvec| = omega
    Vec4 p;          // (r, pvec)
    double w;        // dr dmu dphi weight
  };

  explicit ShellGrid(const QuadratureSpec& s) : spec_(s) {
    if (s.n_phi % 2 != 0)
      throw std::invalid_argument("n_phi must be even");
    const auto& rad = gauss_legendre(s.radial_order);
    const auto& ang = gauss_legendre(s.n_theta);
    double h = s.p_max / s.radial_panels;
    double wphi = 2.0 * M_PI / s.n_phi;
    for (int pan = 0; pan < s.radial_panels; ++pan)
      for (int ir = 0; ir < s.radial_order; ++ir) {
        double r = pan * h + 0.5 * h * (1.0 + rad.nodes[ir]);
        double wr = 0.5 * h * rad.weights[ir];
        for (int it = 0; it < s.n_theta; ++it) {
          double mu = ang.nodes[it];
          double smu = std::sqrt(std::max(0.0, 1.0 - mu * mu));
          for (int ip = 0; ip < s.n_phi; ++ip) {
            double phi = wphi * ip;
            Node n;
            n.r = r;
            n.p = {r, r * smu * std::cos(phi), r * smu * std::sin(phi),
                   r * mu};
            n.w = wr * ang.weights[it] * wphi;
            nodes_.push_back(n);
          }
        }
      }
    // p -> -p: mu -> -mu (theta index reflects), phi -> phi + pi.
    neg_.resize(nodes_.size());
    std::size_t nang = static_cast<std::size_t>(s.n_theta) * s.n_phi;
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
      std::size_t rad_block = i / nang;
      std::size_t it = (i % nang) / s.n_phi;
      std::size_t ip = i % s.n_phi;
      std::size_t itn = s.n_theta - 1 - it;
      std::size_t ipn = (ip + s.n_phi / 2) % s.n_phi;
      neg_[i] = rad_block * nang + itn * s.n_phi + ipn;
    }
  }

  const QuadratureSpec& spec() const { return spec_; }
  const std::vector<Node>& nodes() const { return nodes_; }
  std::size_t size() const { return nodes_.size(); }
  std::size_t neg_index(std::size_t i) const { return neg_[i]; }
  std::size_t id() const { return id_; }

  static std::shared_ptr<const ShellGrid> get(const QuadratureSpec& s) {
    static std::map<decltype(s.key()), std::shared_ptr<ShellGrid>> reg;
    static std::size_t counter = 0;
    auto it = reg.find(s.key());
    if (it == reg.end()) {
      auto g = std::make_shared<ShellGrid>(s);
      g->id_ = ++counter;
      it = reg.emplace(s.key(), std::move(g)).first;
    }
    return it->second;
  }

 private:
  QuadratureSpec spec_;
  std::vector<Node> nodes_;
  std::vector<std::size_t> neg_;
  std::size_t id_ = 0;
};

struct MassShellAmplitude {
  std::shared_ptr<const ShellGrid> grid;
  int ncomp = 1;
  std::vector<cplx> v;  // node-major: v[node * ncomp + c]

  cplx at(std::size_t node, int c) const { return v[node * ncomp + c]; }

  MassShellAmplitude& operator+=(const MassShellAmplitude& o) {
    for (std::size_t i = 0; i < v.size(); ++i) v[i] += o.v[i];
    return *this;
  }
  friend MassShellAmplitude operator*(cplx s, MassShellAmplitude a) {
    for (auto& x : a.v) x *= s;
    return a;
  }
  friend MassShellAmplitude operator-(MassShellAmplitude a,
                                      const MassShellAmplitude& b) {
    for (std::size_t i = 0; i < a.v.size(); ++i) a.v[i] -= b.v[i];
    return a;
  }

  // Amplitude of f(. - t e_0): multiply each node by e^{i omega t}.
  MassShellAmplitude time_translate(double t) const {
    MassShellAmplitude r = *this;
    const auto& ns = grid->nodes();
    for (std::size_t i = 0; i < ns.size(); ++i) {
      cplx ph = std::exp(cplx(0.0, ns[i].r * t));
      for (int c = 0; c < ncomp; ++c) r.v[i * ncomp + c] *= ph;
    }
    return r;
  }
};

// Amplitude of a TestFn on a grid, cached per (function, grid).  Amplitudes
// are linear in the atom list, so sums of functions have exactly additive
// amplitudes on a fixed grid.
inline std::shared_ptr<const MassShellAmplitude> amplitude(
    const TestFn& f, const std::shared_ptr<const ShellGrid>& grid) {
  auto& slot = f.cache_slot(grid->id());
  if (slot) return std::static_pointer_cast<const MassShellAmplitude>(slot);
  auto amp = std::make_shared<MassShellAmplitude>();
  amp->grid = grid;
  amp->ncomp = f.components();
  amp->v.resize(grid->size() * amp->ncomp);
  const auto& ns = grid->nodes();
  for (std::size_t i = 0; i < ns.size(); ++i) {
    auto val = fourier(f, ns[i].p);
    for (int c = 0; c < amp->ncomp; ++c) amp->v[i * amp->ncomp + c] = val[c];
  }
  slot = amp;
  return amp;
}

// Amplitude from an arbitrary momentum-space evaluator (dipoles, limits).
template <class F>
MassShellAmplitude amplitude_from(
    const std::shared_ptr<const ShellGrid>& grid, int ncomp, F&& eval) {
  MassShellAmplitude amp;
  amp.grid = grid;
  amp.ncomp = ncomp;
  amp.v.resize(grid->size() * ncomp);
  const auto& ns = grid->nodes();
  for (std::size_t i = 0; i < ns.size(); ++i) {
    auto val = eval(ns[i]);
    for (int c = 0; c < ncomp; ++c) amp.v[i * ncomp + c] = val[c];
  }
  return amp;
}

}  // namespace weylcharge
