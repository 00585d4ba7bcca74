#pragma once
// Scaling limits, seminorms, and energy functionals on mass-shell
// amplitudes.
//
// Seminorms (spatial components):
//   ||g||_0^2 = INT d^3p/(2w) |g~(p)|^2
//   ||g||_1^2 = INT d^3p/(2w) w/sqrt(1+w^2) |g~(p)|^2   (mollified)
// Transversal projection removes the time component and the p-parallel part
// of the spatial components.
//
// Energies (Parseval on the shell, time-averaged and hence exactly
// t-independent):
//   E_I  = pi INT d^3p w^2 |a_T|^2                (transverse field energy)
//   E_II = pi INT d^3p w^2 sum_k |n~_k - m~_k|^2  (shifted-potential energy)
// with n = grad d0 Lap^-1 m_0, i.e. n~_j = -p_j a_0 / w on the shell
// (contravariant).  E_II - E_I is the longitudinal content, >= 0 nodewise,
// and vanishes exactly when m is purely transverse.

#include <cmath>
#include <functional>
#include <vector>

#include "charges.hpp"
#include "propagators.hpp"

namespace weylcharge {

inline MassShellAmplitude transversal_project(const MassShellAmplitude& a) {
  if (a.ncomp != 4)
    throw std::invalid_argument("transversal_project expects a 4-component "
                                "amplitude");
  MassShellAmplitude out = a;
  const auto& ns = a.grid->nodes();
  for (std::size_t i = 0; i < ns.size(); ++i) {
    out.v[i * 4] = cplx{};
    double r = ns[i].r;
    if (r < 1e-300) continue;
    Vec4 ph{0.0, ns[i].p[1] / r, ns[i].p[2] / r, ns[i].p[3] / r};
    cplx along{};
    for (int j = 1; j < 4; ++j) along += ph[j] * a.at(i, j);
    for (int j = 1; j < 4; ++j) out.v[i * 4 + j] = a.at(i, j) - along * ph[j];
  }
  return out;
}

namespace detail {

inline double spatial_sq(const MassShellAmplitude& a, std::size_t i) {
  double s = 0.0;
  int lo = (a.ncomp == 4) ? 1 : 0;
  for (int c = lo; c < a.ncomp; ++c) s += std::norm(a.at(i, c));
  return s;
}

template <class Weight>
double weighted_norm_sq(const MassShellAmplitude& a, Weight&& wfun) {
  KahanSum s;
  const auto& ns = a.grid->nodes();
  for (std::size_t i = 0; i < ns.size(); ++i)
    s.add(ns[i].w * wfun(ns[i].r) * spatial_sq(a, i));
  return s.value();
}

}  // namespace detail

// ||.||_0: d^3p/(2w) = (r/2) dr dmu dphi.
inline double seminorm0(const MassShellAmplitude& a) {
  return std::sqrt(std::max(
      0.0, detail::weighted_norm_sq(a, [](double r) { return 0.5 * r; })));
}

// ||.||_1: extra mollifier w / sqrt(1 + w^2).
inline double seminorm1(const MassShellAmplitude& a) {
  return std::sqrt(std::max(
      0.0, detail::weighted_norm_sq(a, [](double r) {
        return 0.5 * r * r / std::sqrt(1.0 + r * r);
      })));
}

// Transversal part of the dipole current at finite r (the radiation content).
inline MassShellAmplitude g_m(const Dipole& d,
                              const std::shared_ptr<const ShellGrid>& grid) {
  return transversal_project(d.amplitude(grid));
}

// r -> infinity amplitude: m~_inf^mu(p) = (2pi)^2 theta~(p) |p|^-1 rho^mu(n)
// with rho^mu(n) = INT_0^inf sigma~^mu(u n) du; directions are cached once
// per angular node.
inline MassShellAmplitude limit_amplitude(
    const Dipole& d, const std::shared_ptr<const ShellGrid>& grid) {
  const double SQRT2 = std::sqrt(2.0);
  const auto& spec = grid->spec();
  std::size_t nang = static_cast<std::size_t>(spec.n_theta) * spec.n_phi;
  std::vector<bool> have(nang, false);
  std::vector<std::array<cplx, 4>> rho(nang);
  const auto& ns = grid->nodes();
  return amplitude_from(grid, 4, [&](const ShellGrid::Node& nd) {
    std::size_t idx = (&nd - ns.data()) % nang;
    double pnorm = SQRT2 * nd.r;
    std::array<cplx, 4> out{};
    if (pnorm < 1e-14) return out;
    if (!have[idx]) {
      Vec4 n{nd.p[0] / pnorm, nd.p[1] / pnorm, nd.p[2] / pnorm,
             nd.p[3] / pnorm};
      rho[idx] = d.profile_integral(n, 1e300);
      have[idx] = true;
    }
    cplx pref = 4.0 * M_PI * M_PI * fourier(d.theta(), nd.p)[0] / pnorm;
    out[0] = pref * rho[idx][0];
    for (int j = 1; j < 4; ++j) out[j] = -pref * rho[idx][j];
    return out;
  });
}

// Limit of the dipole phase functional: phi_inf(g) = -<m_inf, D g>.
inline double limit_functional(const MassShellAmplitude& m_inf,
                               const TestFn& g) {
  return -pair_d_amp(m_inf, *amplitude(g, m_inf.grid));
}
inline double phi_m(const Dipole& d, const TestFn& g,
                    const std::shared_ptr<const ShellGrid>& grid) {
  return -pair_d_amp(d.amplitude(grid), *amplitude(g, grid));
}

// --- energies ---------------------------------------------------------------

// Contravariant spatial components from stored covariant ones.
namespace detail {
inline std::array<cplx, 4> contravariant(const MassShellAmplitude& a,
                                         std::size_t i) {
  return {a.at(i, 0), -a.at(i, 1), -a.at(i, 2), -a.at(i, 3)};
}
}  // namespace detail

inline double energy_shift_I(const MassShellAmplitude& m) {
  MassShellAmplitude t = transversal_project(m);
  KahanSum s;
  const auto& ns = m.grid->nodes();
  for (std::size_t i = 0; i < ns.size(); ++i) {
    double r2 = ns[i].r * ns[i].r;
    s.add(ns[i].w * r2 * r2 * detail::spatial_sq(t, i));
  }
  return M_PI * s.value();
}

inline double energy_shift_II(const MassShellAmplitude& m) {
  KahanSum s;
  const auto& ns = m.grid->nodes();
  for (std::size_t i = 0; i < ns.size(); ++i) {
    auto al = detail::contravariant(m, i);
    double r = ns[i].r, r2 = r * r;
    if (r < 1e-300) continue;
    double acc = 0.0;
    for (int j = 1; j < 4; ++j) {
      cplx ntilde = -ns[i].p[j] * al[0] / r;
      acc += std::norm(ntilde - al[j]);
    }
    s.add(ns[i].w * r2 * r2 * acc);
  }
  return M_PI * s.value();
}

// n = grad d0 Lap^-1 m_0 as a stored-component amplitude (time comp 0).
inline MassShellAmplitude n_from_m0(const MassShellAmplitude& m) {
  MassShellAmplitude out = m;
  const auto& ns = m.grid->nodes();
  for (std::size_t i = 0; i < ns.size(); ++i) {
    double r = ns[i].r;
    out.v[i * 4] = cplx{};
    for (int j = 1; j < 4; ++j)
      // contravariant n~_j = -p_j a_0 / w; stored = -contravariant
      out.v[i * 4 + j] = (r < 1e-300) ? cplx{}
                                      : ns[i].p[j] * m.at(i, 0) / r;
  }
  return out;
}

// Difference of the symplectic form sum_j INT (u_j d0 v_j - d0 u_j v_j) d^3x
// between times t1 and t2, with the oscillating e^{+-2iwt} cross terms kept
// explicitly; they cancel nodewise, so the result is a roundoff-level
// diagnostic of t-independence.
inline double middle_term_check(const MassShellAmplitude& a,
                                const MassShellAmplitude& b, double t1,
                                double t2) {
  if (a.grid != b.grid)
    throw std::invalid_argument("grid mismatch in middle_term_check");
  auto sigma_at = [&](double t) {
    // INT u v. and INT u. v are accumulated separately, each with its
    // oscillating cross term; the cross terms cancel only in the final
    // subtraction.
    KahanSum uvdot, udotv;
    const auto& ns = a.grid->nodes();
    int lo = (a.ncomp == 4) ? 1 : 0;
    for (std::size_t i = 0; i < ns.size(); ++i) {
      double w = ns[i].r;
      if (w < 1e-300) continue;
      std::size_t ni = a.grid->neg_index(i);
      double meas = ns[i].w / 4.0;  // d^3p/(4 w^2) absorbs the r^2
      for (int c = lo; c < a.ncomp; ++c) {
        cplx au = a.at(i, c), bu = b.at(i, c);
        cplx z = au * b.at(ni, c) * std::exp(cplx(0.0, -2.0 * w * t));
        double diag = 2.0 * w * std::imag(au * std::conj(bu));
        double cross = 2.0 * w * std::imag(z);
        uvdot.add(meas * (-diag + cross));
        udotv.add(meas * (diag + cross));
      }
    }
    return (uvdot.value() - udotv.value()) / std::pow(2.0 * M_PI, 3);
  };
  return std::abs(sigma_at(t1) - sigma_at(t2));
}

// --- Richardson extrapolation over r-doublings -------------------------------

struct RichardsonResult {
  double value = std::nan("");      // extrapolated limit
  double order = std::nan("");      // empirical convergence order
  bool monotone = false;            // |v_k - v_last| decreasing
};

inline RichardsonResult richardson(const std::vector<double>& v) {
  RichardsonResult r;
  std::size_t n = v.size();
  if (n < 3) return r;
  double d1 = v[n - 2] - v[n - 3];
  double d2 = v[n - 1] - v[n - 2];
  if (d1 == 0.0 || d2 == 0.0 || d1 * d2 <= 0.0) {
    r.value = v[n - 1];
    return r;
  }
  double q = std::log2(std::abs(d1 / d2));
  double f = std::pow(2.0, q) - 1.0;
  r.order = q;
  r.value = v[n - 1] + d2 / f;
  r.monotone = true;
  for (std::size_t k = 1; k + 1 < n; ++k)
    if (std::abs(v[k] - v[n - 1]) >= std::abs(v[k - 1] - v[n - 1]))
      r.monotone = false;
  return r;
}

}  // namespace weylcharge
