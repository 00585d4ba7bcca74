#pragma once
// The polynomial *-algebra generated by exponentials of the gauge field and
// the charged field:
//   V(g)   gauge-invariant field exponential, g vector with delta g = 0,
//   W(m)   field exponential, m any vector test function,
//   psi(rho) charged field exponential, rho scalar.
// Relations used for the normal form  e^{i theta} psi(rho_tot) W(m_tot):
//   W(f) W(g)            = e^{-(i/2) <f, D g>}     W(f + g)
//   W(m) psi(rho) W(m)^* = e^{-i <delta m, Dflat rho>} psi(rho)
//   psi(rho) psi(rho')   = psi(rho + rho')
// All phases are collected through pairings that are exactly bilinear in the
// atom lists, so reduction order does not matter beyond roundoff.

#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include "propagators.hpp"

namespace weylcharge {

struct NotGaugeInvariantError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class GenKind { V, W, Psi };

struct Generator {
  GenKind kind = GenKind::W;
  TestFn arg;
};

struct WeylWord {
  double angle = 0.0;  // accumulated scalar phase e^{i angle}
  std::vector<Generator> gens;
};

struct NormalForm {
  double angle = 0.0;
  TestFn rho_tot{Rank::Scalar, {}};
  TestFn m_tot{Rank::Vector, {}};
};

inline double wrap_angle(double a) {
  a = std::remainder(a, 2.0 * M_PI);
  return a;
}
inline double angle_distance(double a, double b) {
  return std::abs(wrap_angle(a - b));
}

class WeylAlgebra {
 public:
  explicit WeylAlgebra(const QuadratureSpec& spec)
      : grid_(ShellGrid::get(spec)) {}

  const std::shared_ptr<const ShellGrid>& grid() const { return grid_; }

  Generator V(const TestFn& g, double tol = 1e-8) const {
    if (g.rank() != Rank::Vector)
      throw std::invalid_argument("V expects a vector test function");
    TestFn dg = compact(coderivative1(g));
    double scale = l2_norm(g) / std::max(min_width(g), 1e-12);
    if (l2_norm(dg) > tol * std::max(scale, 1e-300))
      throw std::invalid_argument("V requires delta g = 0");
    return Generator{GenKind::V, g};
  }
  Generator W(const TestFn& m) const {
    if (m.rank() != Rank::Vector)
      throw std::invalid_argument("W expects a vector test function");
    return Generator{GenKind::W, m};
  }
  Generator Psi(const TestFn& rho) const {
    if (rho.rank() != Rank::Scalar)
      throw std::invalid_argument("psi expects a scalar test function");
    return Generator{GenKind::Psi, rho};
  }

  static WeylWord word(std::vector<Generator> gens, double angle = 0.0) {
    return WeylWord{angle, std::move(gens)};
  }
  static WeylWord multiply(const WeylWord& a, const WeylWord& b) {
    WeylWord r = a;
    r.angle += b.angle;
    r.gens.insert(r.gens.end(), b.gens.begin(), b.gens.end());
    return r;
  }
  static WeylWord adjoint(const WeylWord& w) {
    WeylWord r;
    r.angle = -w.angle;
    for (auto it = w.gens.rbegin(); it != w.gens.rend(); ++it)
      r.gens.push_back(Generator{it->kind, -1.0 * it->arg});
    return r;
  }

  NormalForm normal_form(const WeylWord& w) const {
    NormalForm nf;
    nf.angle = w.angle;
    for (const auto& g : w.gens) {
      if (g.kind == GenKind::Psi) {
        // psi(rho) through W(m_acc): conjugation phase from Dflat
        if (!nf.m_tot.empty())
          nf.angle += -pair_dflat(coderivative1(nf.m_tot), g.arg);
        nf.rho_tot = nf.rho_tot + g.arg;
      } else {
        if (!nf.m_tot.empty())
          nf.angle += -0.5 * pair_d(nf.m_tot, g.arg, grid_);
        nf.m_tot = nf.m_tot + g.arg;
      }
    }
    return nf;
  }

  // Product of two normal forms, reduced again to normal form.
  NormalForm combine(const NormalForm& a, const NormalForm& b) const {
    NormalForm nf;
    nf.angle = a.angle + b.angle;
    if (!a.m_tot.empty() && !b.rho_tot.empty())
      nf.angle += -pair_dflat(coderivative1(a.m_tot), b.rho_tot);
    if (!a.m_tot.empty() && !b.m_tot.empty())
      nf.angle += -0.5 * pair_d(a.m_tot, b.m_tot, grid_);
    nf.rho_tot = a.rho_tot + b.rho_tot;
    nf.m_tot = a.m_tot + b.m_tot;
    return nf;
  }

  // Vacuum state.  Defined on gauge-invariant elements, i.e. those with
  // rho_tot = delta m_tot; vanishes on the charged sectors (delta m != 0).
  cplx omega0(const NormalForm& nf, double tol = 1e-6) const {
    TestFn dm = compact(coderivative1(nf.m_tot));
    TestFn resid = compact(nf.rho_tot - dm);
    double m_scale = nf.m_tot.empty()
                         ? 0.0
                         : l2_norm(nf.m_tot) /
                               std::max(min_width(nf.m_tot), 1e-12);
    double scale = std::max({l2_norm(nf.rho_tot), m_scale, 1e-300});
    if (l2_norm(resid) > tol * scale)
      throw NotGaugeInvariantError(
          "omega0 is only defined on gauge-invariant elements "
          "(rho_tot must equal delta m_tot)");
    double dm_scale = nf.m_tot.empty()
                          ? 0.0
                          : l2_norm(nf.m_tot) / std::max(min_width(nf.m_tot),
                                                         1e-12);
    bool charged = !nf.m_tot.empty() && l2_norm(dm) > tol * dm_scale;
    if (charged) return cplx{0.0, 0.0};
    cplx expo = nf.m_tot.empty()
                    ? cplx{}
                    : 0.5 * pair_dplus(nf.m_tot, nf.m_tot, grid_);
    return std::exp(cplx(0.0, nf.angle) + expo);
  }
  cplx omega0(const WeylWord& w, double tol = 1e-6) const {
    return omega0(normal_form(w), tol);
  }

  // Gauge transformation gamma_s, s a scalar test function:
  //   gamma_s(W(m)) = e^{-i INT s delta m} W(m),
  //   gamma_s(psi(rho)) = e^{+i INT s rho} psi(rho),  V invariant.
  WeylWord gauge_transform(const TestFn& s, const WeylWord& w) const {
    WeylWord r = w;
    for (const auto& g : r.gens) {
      if (g.kind == GenKind::Psi)
        r.angle += l2_inner(s, g.arg);
      else if (g.kind == GenKind::W)
        r.angle += -l2_inner(s, coderivative1(g.arg));
    }
    return r;
  }

  // Charge automorphism beta_m for an external current amplitude M:
  // each field exponential V(g) / W(g) picks up e^{i phi_m(g)},
  // phi_m(g) = -<m, D g>; psi factors are unchanged.
  WeylWord beta(const MassShellAmplitude& M, const WeylWord& w) const {
    WeylWord r = w;
    for (const auto& g : r.gens)
      if (g.kind != GenKind::Psi)
        r.angle += -pair_d_amp(M, *amplitude(g.arg, grid_));
    return r;
  }
  double beta_phase(const MassShellAmplitude& M, const TestFn& g) const {
    return -pair_d_amp(M, *amplitude(g, grid_));
  }

 private:
  std::shared_ptr<const ShellGrid> grid_;
};

}  // namespace weylcharge
