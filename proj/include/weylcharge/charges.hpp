#pragma once
// External charges: dipole currents, measurement functions, and the Gauss
// readout.
//
// A dipole is built from a charge profile theta (scalar, INT theta = Q) and a
// spacelike-localized compensator profile sigma (scalar, INT sigma = 1).  The
// scaled profile is sigma_r(x) = r^-4 sigma(x/r); the current m(sigma_r) has
//   delta m = theta - theta * sigma_r      (* = convolution)
// and mass-shell transform
//   m~^mu(p) = (2pi)^2 theta~(p) |p|^-1 INT_0^{r|p|} du sigma~^mu(u n),
// where |p| is the Euclidean 4-norm (sqrt(2) omega on shell), n = p/|p|, and
// sigma^mu(b) = b^mu sigma(b).  Contravariant m~^mu is converted to the
// stored covariant components on output.

#include <array>
#include <map>
#include <string>

#include "propagators.hpp"
#include "shell.hpp"

namespace weylcharge {

class Dipole {
 public:
  Dipole(TestFn theta, TestFn sigma, double r = 1.0)
      : theta_(std::move(theta)), sigma_(std::move(sigma)), r_(r) {
    if (theta_.rank() != Rank::Scalar || sigma_.rank() != Rank::Scalar)
      throw std::invalid_argument("dipole profiles must be scalar");
    for (int mu = 0; mu < 4; ++mu) {
      std::vector<std::pair<int, Atom>> atoms;
      for (const auto& [c, a] : sigma_.atoms())
        for (const auto& ma : atom_mul_coord(a, mu)) atoms.emplace_back(0, ma);
      sigma_mu_[mu] = TestFn(Rank::Scalar, std::move(atoms));
    }
  }

  const TestFn& theta() const { return theta_; }
  const TestFn& sigma() const { return sigma_; }
  double r() const { return r_; }
  Dipole with_r(double r) const { return Dipole(theta_, sigma_, r); }

  // Total charge Q = INT theta = (2 pi)^2 theta~(0).
  double charge() const {
    return 4.0 * M_PI * M_PI * fourier(theta_, Vec4{})[0].real();
  }

  // sigma~^mu(q), all four components (mixed-sign kernel, contravariant).
  std::array<cplx, 4> sigma_tilde_mu(const Vec4& q) const {
    std::array<cplx, 4> out;
    for (int mu = 0; mu < 4; ++mu) out[mu] = fourier(sigma_mu_[mu], q)[0];
    return out;
  }

  // INT_0^R sigma~^mu(u n) du, integrated in adaptive windows until the
  // contribution is negligible (R may be huge or infinite).
  std::array<cplx, 4> profile_integral(const Vec4& n, double R) const {
    std::array<cplx, 4> acc{};
    const double win = 16.0 / std::max(min_width(sigma_), 1e-12);
    double lo = 0.0;
    double norm = 0.0;
    while (lo < R) {
      double hi = std::min(R, lo + win);
      for (int mu = 0; mu < 4; ++mu) {
        TestFn comp = sigma_mu_[mu];
        cplx part = integrate_adaptive<cplx>(
            [&](double u) {
              return fourier(comp, Vec4{u * n[0], u * n[1], u * n[2],
                                        u * n[3]})[0];
            },
            lo, hi, 1e-10, 0.1, 4);
        acc[mu] += part;
        norm = std::max(norm, std::abs(acc[mu]));
      }
      // stop once a full window is negligible against the accumulated value
      double tailmag = 0.0;
      for (int mu = 0; mu < 4; ++mu) {
        cplx probe = fourier(sigma_mu_[mu], Vec4{hi * n[0], hi * n[1],
                                                 hi * n[2], hi * n[3]})[0];
        tailmag = std::max(tailmag, std::abs(probe));
      }
      lo = hi;
      if (tailmag * win < 1e-13 * std::max(norm, 1e-30)) break;
    }
    return acc;
  }

  // Stored-component amplitude of m(sigma_r) on a grid; cached per grid.
  const MassShellAmplitude& amplitude(
      const std::shared_ptr<const ShellGrid>& grid) const {
    auto it = amp_cache_.find(grid->id());
    if (it != amp_cache_.end()) return it->second;
    const double SQRT2 = std::sqrt(2.0);
    MassShellAmplitude amp = amplitude_from(
        grid, 4, [&](const ShellGrid::Node& nd) {
          double pnorm = SQRT2 * nd.r;  // Euclidean 4-norm on shell
          std::array<cplx, 4> out{};
          if (pnorm < 1e-14) return out;
          Vec4 n{nd.p[0] / pnorm, nd.p[1] / pnorm, nd.p[2] / pnorm,
                 nd.p[3] / pnorm};
          auto I = profile_integral(n, r_ * pnorm);
          cplx pref = 4.0 * M_PI * M_PI * fourier(theta_, nd.p)[0] / pnorm;
          out[0] = pref * I[0];
          for (int j = 1; j < 4; ++j) out[j] = -pref * I[j];  // to covariant
          return out;
        });
    return amp_cache_.emplace(grid->id(), std::move(amp)).first->second;
  }

  // Charge density delta m = theta - theta * sigma_r, as an evaluator and a
  // support box (the convolution is done by direct quadrature when needed).
  double charge_density(const Vec4& x) const {
    TestFn sr = sigma_.scale_profile(r_);
    Box4 sb = sr.support().bounding_box();
    const auto& rule = gauss_legendre(10);
    double conv = 0.0;
    // separable 4-d Gauss-Legendre over the sigma_r support
    std::array<std::vector<std::pair<double, double>>, 4> ax;
    for (int i = 0; i < 4; ++i)
      for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
        double mid = 0.5 * (sb.lo[i] + sb.hi[i]);
        double half = 0.5 * (sb.hi[i] - sb.lo[i]);
        ax[i].emplace_back(mid + half * rule.nodes[k],
                           half * rule.weights[k]);
      }
    for (auto [y0, w0] : ax[0])
      for (auto [y1, w1] : ax[1])
        for (auto [y2, w2] : ax[2])
          for (auto [y3, w3] : ax[3])
            conv += w0 * w1 * w2 * w3 *
                    theta_.eval_scalar(
                        Vec4{x[0] - y0, x[1] - y1, x[2] - y2, x[3] - y3}) *
                    sr.eval_scalar(Vec4{y0, y1, y2, y3});
    return theta_.eval_scalar(x) - conv;
  }

  // Amplitude of the charge density delta m = theta - theta * sigma_r in
  // closed form: delta_m~(p) = theta~(p) (1 - (2pi)^2 sigma~(r p)).
  MassShellAmplitude charge_amplitude(
      const std::shared_ptr<const ShellGrid>& grid) const {
    return amplitude_from(grid, 1, [&](const ShellGrid::Node& nd) {
      cplx th = fourier(theta_, nd.p)[0];
      cplx sg = fourier(sigma_, Vec4{r_ * nd.p[0], r_ * nd.p[1],
                                     r_ * nd.p[2], r_ * nd.p[3]})[0];
      std::vector<cplx> out(1);
      out[0] = th * (1.0 - 4.0 * M_PI * M_PI * sg);
      return out;
    });
  }

  Box4 charge_box() const { return theta_.support().bounding_box(); }
  Box4 compensator_box() const {
    return theta_.support().bounding_box().minkowski_sum(
        sigma_.scale_profile(r_).support().bounding_box());
  }

 private:
  TestFn theta_, sigma_;
  double r_;
  std::array<TestFn, 4> sigma_mu_;
  mutable std::map<std::size_t, MassShellAmplitude> amp_cache_;
};

// ---------------------------------------------------------------------------
// Measurement function h = tau(x0) chi(xvec): tau a normalized bump around
// the measurement time, chi a plateau that is 1 on the inner box and falls
// to 0 across a margin of width `margin`.

struct MeasurementFn {
  double t0 = 0.0, half_duration = 0.5;
  std::array<double, 3> center{};          // spatial center
  std::array<double, 3> inner_half{};      // plateau inner half-extents R_i
  double margin = 0.5;

  TestFn h() const {
    Atom a;
    a.coef = 1.0 / (half_duration * bump_mass());  // INT tau = 1
    a.center = {t0, center[0], center[1], center[2]};
    a.width[0] = half_duration;
    a.factors[0] = Factor{};
    for (int i = 0; i < 3; ++i) {
      double w = inner_half[i] + margin;
      a.width[i + 1] = w;
      a.factors[i + 1] = Factor{Factor::Kind::Plateau, 0, 0, margin / w};
    }
    return TestFn(Rank::Vector, {{0, a}});
  }

  TestFn probe() const { return delta_d(h()); }

  Box4 support_box() const { return h().support().bounding_box(); }

  // The six margin slabs (per axis and side), over the duration of tau.
  std::vector<Box4> margin_slabs() const {
    std::vector<Box4> out;
    Box4 full = support_box();
    for (int i = 0; i < 3; ++i)
      for (int side = 0; side < 2; ++side) {
        Box4 b = full;
        b.lo[0] = t0 - half_duration;
        b.hi[0] = t0 + half_duration;
        if (side == 0) {
          b.lo[i + 1] = center[i] + inner_half[i];
          b.hi[i + 1] = center[i] + inner_half[i] + margin;
        } else {
          b.lo[i + 1] = center[i] - inner_half[i] - margin;
          b.hi[i + 1] = center[i] - inner_half[i];
        }
        out.push_back(b);
      }
    return out;
  }

  // Effective containment: spatial support inside the plateau, and the
  // margin region's causal shadow over supp tau misses the region.
  bool effectively_contains(const Box4& b) const {
    for (int i = 0; i < 3; ++i) {
      if (b.lo[i + 1] < center[i] - inner_half[i]) return false;
      if (b.hi[i + 1] > center[i] + inner_half[i]) return false;
    }
    for (const auto& slab : margin_slabs())
      if (!spacelike_separated(slab, b)) return false;
    return true;
  }

  // Spacelike to the (causal completion of the) measurement support.
  bool spacelike_to(const Box4& b) const {
    return spacelike_separated(support_box(), b);
  }
};

enum class GaussCase { BothInside, CompensatorInside, FixedInside,
                       Indeterminate };

inline std::string to_string(GaussCase c) {
  switch (c) {
    case GaussCase::BothInside: return "both_inside";
    case GaussCase::CompensatorInside: return "compensator_inside";
    case GaussCase::FixedInside: return "fixed_inside";
    case GaussCase::Indeterminate: return "indeterminate";
  }
  return "?";
}

inline GaussCase classify_gauss(const MeasurementFn& mf, const Dipole& d) {
  Box4 cb = d.charge_box();
  Box4 kb = d.compensator_box();
  bool c_in = mf.effectively_contains(cb);
  bool k_in = mf.effectively_contains(kb);
  bool c_out = mf.spacelike_to(cb);
  bool k_out = mf.spacelike_to(kb);
  if (c_in && k_in) return GaussCase::BothInside;
  if (k_in && c_out) return GaussCase::CompensatorInside;
  if (c_in && k_out) return GaussCase::FixedInside;
  return GaussCase::Indeterminate;
}

// Expected reading of the charge operator in each geometry.
inline double gauss_expected(GaussCase c, double Q) {
  switch (c) {
    case GaussCase::BothInside: return 0.0;
    case GaussCase::CompensatorInside: return -Q;
    case GaussCase::FixedInside: return Q;
    case GaussCase::Indeterminate: return std::nan("");
  }
  return std::nan("");
}

// Gauss readout: the phase of the measurement probe on the dipole sector,
// -<m, D (delta d h)>.  Direct route, pairing the four-component dipole
// amplitude against the full probe delta d h.
inline double gauss_readout_vector(
    const Dipole& d, const MeasurementFn& mf,
    const std::shared_ptr<const ShellGrid>& grid) {
  return -pair_d_amp(d.amplitude(grid), *amplitude(mf.probe(), grid));
}

// Scalar route for the same phase.  Integrating by parts and using that D
// annihilates box h turns -<m, D(d delta h - box h)> into
// <delta m, D delta h>, a pairing of two scalar densities with closed-form
// amplitudes.  Much cheaper and better conditioned than the vector route,
// with which it agrees (see tests); this is the production path.
inline double gauss_readout(const Dipole& d, const MeasurementFn& mf,
                            const std::shared_ptr<const ShellGrid>& grid) {
  TestFn dh = compact(coderivative1(mf.h()));
  return pair_d_amp(d.charge_amplitude(grid), *amplitude(dh, grid));
}

}  // namespace weylcharge
