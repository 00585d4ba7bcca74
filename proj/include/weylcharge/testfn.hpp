#pragma once
// Test functions on R^4: finite sums of separable bump atoms, with an exact
// derivative calculus, L^2 pairings, Fourier transforms, and JSON
// serialization.
//
// Conventions (fixed once, used everywhere):
//  * signature (+,-,-,-), index 0 = time;
//  * vector-valued functions store the covariant component arrays, so the
//    coderivative is  delta g = d_0 g_0 - div g_spatial  and the exterior
//    derivative of a scalar is  ds = (d_0 s, grad s);
//  * Fourier transform  f~(p) = (2 pi)^-2 INT e^{i(p_0 x_0 - p.x)} f(x) d^4x.

#include <atomic>
#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

#include "bump.hpp"
#include "geometry.hpp"
#include "quad1d.hpp"

namespace weylcharge {

struct Atom {
  double coef = 1.0;
  Vec4 center{};
  Vec4 width{1.0, 1.0, 1.0, 1.0};
  std::array<Factor, 4> factors{};

  double eval(const Vec4& x) const {
    double v = coef;
    for (int i = 0; i < 4 && v != 0.0; ++i)
      v *= factors[i]((x[i] - center[i]) / width[i]);
    return v;
  }
  Box4 box() const {
    Box4 b;
    for (int i = 0; i < 4; ++i) {
      b.lo[i] = center[i] - width[i];
      b.hi[i] = center[i] + width[i];
    }
    return b;
  }
};

// d/dx_axis of an atom; exact within the atom family.
inline std::vector<Atom> atom_derivative(const Atom& a, int axis) {
  std::vector<Atom> out;
  const Factor& f = a.factors[axis];
  double w = a.width[axis];
  if (f.kind == Factor::Kind::Bump) {
    int k = f.pow, q = f.inv_pow;
    if (k > 0) {
      Atom t = a;
      t.coef *= k / w;
      t.factors[axis] = Factor{Factor::Kind::Bump, k - 1, q, 0.0};
      out.push_back(t);
    }
    if (q > 0) {
      Atom t = a;
      t.coef *= 2.0 * q / w;
      t.factors[axis] = Factor{Factor::Kind::Bump, k + 1, q + 1, 0.0};
      out.push_back(t);
    }
    Atom t = a;
    t.coef *= -2.0 / w;
    t.factors[axis] = Factor{Factor::Kind::Bump, k + 1, q + 2, 0.0};
    out.push_back(t);
    return out;
  }
  // Plateau: derivative is a rising edge bump minus a falling edge bump.
  double h = 0.5 * f.edge;
  double scale = 1.0 / (w * bump_mass() * h);
  Atom rise = a;
  rise.coef *= scale;
  rise.center[axis] = a.center[axis] - w * (1.0 - h);
  rise.width[axis] = w * h;
  rise.factors[axis] = Factor{};
  out.push_back(rise);
  Atom fall = a;
  fall.coef *= -scale;
  fall.center[axis] = a.center[axis] + w * (1.0 - h);
  fall.width[axis] = w * h;
  fall.factors[axis] = Factor{};
  out.push_back(fall);
  return out;
}

// x_axis * atom = (c + w u) * atom; requires a Bump factor on that axis.
inline std::vector<Atom> atom_mul_coord(const Atom& a, int axis) {
  const Factor& f = a.factors[axis];
  if (f.kind != Factor::Kind::Bump)
    throw std::invalid_argument("coordinate multiplication needs a bump axis");
  Atom t0 = a;
  t0.coef *= a.center[axis];
  Atom t1 = a;
  t1.coef *= a.width[axis];
  t1.factors[axis].pow += 1;
  return {t0, t1};
}

enum class Rank { Scalar, Vector, Skew2 };

inline int rank_components(Rank r) {
  switch (r) {
    case Rank::Scalar: return 1;
    case Rank::Vector: return 4;
    case Rank::Skew2: return 6;
  }
  return 0;
}

class TestFn {
 public:
  TestFn() : TestFn(Rank::Scalar, {}) {}
  TestFn(Rank rank, std::vector<std::pair<int, Atom>> atoms) {
    auto d = std::make_shared<Data>();
    d->rank = rank;
    d->atoms = std::move(atoms);
    d->id = next_id();
    d_ = std::move(d);
  }

  Rank rank() const { return d_->rank; }
  int components() const { return rank_components(d_->rank); }
  const std::vector<std::pair<int, Atom>>& atoms() const { return d_->atoms; }
  std::uint64_t id() const { return d_->id; }
  bool empty() const { return d_->atoms.empty(); }

  std::vector<double> eval(const Vec4& x) const {
    std::vector<double> v(components(), 0.0);
    for (const auto& [c, a] : d_->atoms) v[c] += a.eval(x);
    return v;
  }
  double eval_scalar(const Vec4& x) const { return eval(x)[0]; }

  SupportRegion support() const {
    SupportRegion r;
    for (const auto& [c, a] : d_->atoms) r.boxes.push_back(a.box());
    if (r.boxes.empty()) r.boxes.push_back(Box4{});
    return r;
  }

  TestFn operator+(const TestFn& o) const {
    if (rank() != o.rank())
      throw std::invalid_argument("rank mismatch in TestFn sum");
    auto atoms = d_->atoms;
    atoms.insert(atoms.end(), o.d_->atoms.begin(), o.d_->atoms.end());
    return TestFn(rank(), std::move(atoms));
  }
  TestFn operator-(const TestFn& o) const { return *this + (-1.0) * o; }
  friend TestFn operator*(double s, const TestFn& f) {
    auto atoms = f.d_->atoms;
    for (auto& [c, a] : atoms) a.coef *= s;
    return TestFn(f.rank(), std::move(atoms));
  }

  TestFn translate(const Vec4& shift) const {
    auto atoms = d_->atoms;
    for (auto& [c, a] : atoms) a.center = a.center + shift;
    return TestFn(rank(), std::move(atoms));
  }

  // f(x) -> r^{-4} f(x / r): the dipole-profile scaling.
  TestFn scale_profile(double r) const {
    auto atoms = d_->atoms;
    double s = 1.0 / (r * r * r * r);
    for (auto& [c, a] : atoms) {
      a.coef *= s;
      a.center = r * a.center;
      a.width = r * a.width;
    }
    return TestFn(rank(), std::move(atoms));
  }

  // Opaque per-instance cache slot (used for mass-shell amplitudes).
  std::shared_ptr<const void>& cache_slot(std::size_t key) const {
    return d_->cache[key];
  }

 private:
  struct Data {
    Rank rank;
    std::vector<std::pair<int, Atom>> atoms;
    std::uint64_t id;
    mutable std::map<std::size_t, std::shared_ptr<const void>> cache;
  };
  static std::uint64_t next_id() {
    static std::atomic<std::uint64_t> n{1};
    return n.fetch_add(1);
  }
  std::shared_ptr<Data> d_;
};

// Merge atoms with identical geometry and factors (coefficients add exactly);
// structural cancellations like d1 d2 s - d2 d1 s collapse to zero atoms.
inline TestFn compact(const TestFn& f) {
  std::vector<std::pair<int, Atom>> out;
  for (const auto& [c, a] : f.atoms()) {
    bool merged = false;
    for (auto& [oc, oa] : out) {
      if (oc != c || !(oa.center == a.center) || !(oa.width == a.width) ||
          !(oa.factors == a.factors))
        continue;
      oa.coef += a.coef;
      merged = true;
      break;
    }
    if (!merged) out.emplace_back(c, a);
  }
  std::erase_if(out, [](const auto& p) { return p.second.coef == 0.0; });
  return TestFn(f.rank(), std::move(out));
}

// --- differential operators (exact on atoms) -------------------------------

inline TestFn partial(const TestFn& f, int axis) {
  std::vector<std::pair<int, Atom>> atoms;
  for (const auto& [c, a] : f.atoms())
    for (const auto& da : atom_derivative(a, axis)) atoms.emplace_back(c, da);
  return TestFn(f.rank(), std::move(atoms));
}

// delta g = d_0 g_0 - div g_spatial on stored (covariant) components.
inline TestFn coderivative1(const TestFn& g) {
  if (g.rank() != Rank::Vector)
    throw std::invalid_argument("coderivative1 expects a vector function");
  std::vector<std::pair<int, Atom>> atoms;
  for (const auto& [c, a] : g.atoms()) {
    double sign = (c == 0) ? 1.0 : -1.0;
    for (auto da : atom_derivative(a, c)) {
      da.coef *= sign;
      atoms.emplace_back(0, da);
    }
  }
  return TestFn(Rank::Scalar, std::move(atoms));
}

// ds = (d_0 s, grad s) in stored components.
inline TestFn grad_ds(const TestFn& s) {
  if (s.rank() != Rank::Scalar)
    throw std::invalid_argument("grad_ds expects a scalar function");
  std::vector<std::pair<int, Atom>> atoms;
  for (int mu = 0; mu < 4; ++mu)
    for (const auto& [c, a] : s.atoms())
      for (const auto& da : atom_derivative(a, mu)) atoms.emplace_back(mu, da);
  return TestFn(Rank::Vector, std::move(atoms));
}

// box = d_0^2 - Laplacian, componentwise.
inline TestFn box_op(const TestFn& f) {
  std::vector<std::pair<int, Atom>> atoms;
  for (const auto& [c, a] : f.atoms())
    for (int mu = 0; mu < 4; ++mu) {
      double sign = (mu == 0) ? 1.0 : -1.0;
      for (const auto& d1 : atom_derivative(a, mu))
        for (auto d2 : atom_derivative(d1, mu)) {
          d2.coef *= sign;
          atoms.emplace_back(c, d2);
        }
    }
  return TestFn(f.rank(), std::move(atoms));
}

// delta d h = d(delta h) - box h for a vector h (used for Gauss probes).
inline TestFn delta_d(const TestFn& h) {
  if (h.rank() != Rank::Vector)
    throw std::invalid_argument("delta_d expects a vector function");
  return grad_ds(coderivative1(h)) - box_op(h);
}

// --- L^2 pairing ------------------------------------------------------------

inline double axis_overlap_integral(const Factor& fa, double ca, double wa,
                                    const Factor& fb, double cb, double wb) {
  double lo = std::max(ca - wa, cb - wb);
  double hi = std::min(ca + wa, cb + wb);
  if (hi <= lo) return 0.0;
  auto f = [&](double x) {
    return fa((x - ca) / wa) * fb((x - cb) / wb);
  };
  return integrate_adaptive<double>(f, lo, hi, 1e-11, 1.0, 2);
}

inline double l2_inner(const TestFn& f, const TestFn& g) {
  if (f.rank() != g.rank())
    throw std::invalid_argument("rank mismatch in l2_inner");
  KahanSum s;
  for (const auto& [cf, af] : f.atoms())
    for (const auto& [cg, ag] : g.atoms()) {
      if (cf != cg) continue;
      double v = af.coef * ag.coef;
      for (int i = 0; i < 4 && v != 0.0; ++i)
        v *= axis_overlap_integral(af.factors[i], af.center[i], af.width[i],
                                   ag.factors[i], ag.center[i], ag.width[i]);
      s.add(v);
    }
  return s.value();
}

inline double l2_norm(const TestFn& f) {
  return std::sqrt(std::max(0.0, l2_inner(f, f)));
}

// --- Fourier transform ------------------------------------------------------

// Componentwise f~(p) with p = (p0, pvec); stored components transform as-is.
inline std::vector<cplx> fourier(const TestFn& f, const Vec4& p) {
  const double TWO_PI_SQ_INV = 1.0 / (4.0 * M_PI * M_PI);
  Vec4 omega{p[0], -p[1], -p[2], -p[3]};
  std::vector<cplx> out(f.components(), cplx{});
  for (const auto& [c, a] : f.atoms()) {
    cplx v = a.coef * TWO_PI_SQ_INV;
    for (int i = 0; i < 4; ++i) {
      double al = a.width[i] * omega[i];
      v *= a.width[i] * std::exp(cplx(0.0, omega[i] * a.center[i])) *
           axis_transform(a.factors[i], al);
    }
    out[c] += v;
  }
  return out;
}

// --- smallest axis width (sets the default momentum cutoff) -----------------

inline double min_width(const TestFn& f) {
  double w = 1e300;
  for (const auto& [c, a] : f.atoms())
    for (int i = 0; i < 4; ++i) w = std::min(w, a.width[i]);
  return w;
}

// --- JSON serialization ------------------------------------------------------

inline nlohmann::json to_json(const TestFn& f) {
  nlohmann::json j;
  switch (f.rank()) {
    case Rank::Scalar: j["rank"] = "scalar"; break;
    case Rank::Vector: j["rank"] = "vector"; break;
    case Rank::Skew2: j["rank"] = "skew2"; break;
  }
  j["atoms"] = nlohmann::json::array();
  for (const auto& [c, a] : f.atoms()) {
    nlohmann::json ja;
    ja["component"] = c;
    ja["coef"] = a.coef;
    ja["center"] = a.center;
    ja["widths"] = a.width;
    std::array<int, 4> mono{}, poles{};
    std::array<double, 4> plateau{};
    bool has_pole = false, has_plateau = false;
    for (int i = 0; i < 4; ++i) {
      if (a.factors[i].kind == Factor::Kind::Plateau) {
        plateau[i] = a.factors[i].edge;
        has_plateau = true;
      } else {
        mono[i] = a.factors[i].pow;
        poles[i] = a.factors[i].inv_pow;
        if (poles[i]) has_pole = true;
      }
    }
    ja["monomial"] = mono;
    if (has_pole) ja["poles"] = poles;
    if (has_plateau) ja["plateau"] = plateau;
    j["atoms"].push_back(std::move(ja));
  }
  return j;
}

inline TestFn testfn_from_json(const nlohmann::json& j) {
  std::string rk = j.at("rank").get<std::string>();
  Rank rank = rk == "scalar"  ? Rank::Scalar
              : rk == "vector" ? Rank::Vector
              : rk == "skew2"  ? Rank::Skew2
                               : throw std::invalid_argument("bad rank: " + rk);
  std::vector<std::pair<int, Atom>> atoms;
  for (const auto& ja : j.at("atoms")) {
    Atom a;
    int c = ja.value("component", 0);
    a.coef = ja.at("coef").get<double>();
    auto ctr = ja.at("center").get<std::vector<double>>();
    auto wid = ja.at("widths").get<std::vector<double>>();
    std::vector<int> mono = ja.value("monomial", std::vector<int>(4, 0));
    std::vector<int> poles = ja.value("poles", std::vector<int>(4, 0));
    std::vector<double> plateau =
        ja.value("plateau", std::vector<double>(4, 0.0));
    for (int i = 0; i < 4; ++i) {
      a.center[i] = ctr.at(i);
      a.width[i] = wid.at(i);
      if (a.width[i] <= 0.0)
        throw std::invalid_argument("atom widths must be positive");
      if (plateau[i] > 0.0)
        a.factors[i] = Factor{Factor::Kind::Plateau, 0, 0, plateau[i]};
      else
        a.factors[i] = Factor{Factor::Kind::Bump, mono.at(i), poles.at(i), 0.0};
    }
    if (c < 0 || c >= rank_components(rank))
      throw std::invalid_argument("component index out of range");
    atoms.emplace_back(c, a);
  }
  return TestFn(rank, std::move(atoms));
}

// --- convenience builders -----------------------------------------------------

inline Atom make_bump_atom(double coef, const Vec4& center, const Vec4& width,
                           const std::array<int, 4>& mono = {0, 0, 0, 0}) {
  Atom a;
  a.coef = coef;
  a.center = center;
  a.width = width;
  for (int i = 0; i < 4; ++i)
    a.factors[i] = Factor{Factor::Kind::Bump, mono[i], 0, 0.0};
  return a;
}

inline TestFn scalar_bump(double coef, const Vec4& center, const Vec4& width,
                          const std::array<int, 4>& mono = {0, 0, 0, 0}) {
  return TestFn(Rank::Scalar, {{0, make_bump_atom(coef, center, width, mono)}});
}

inline TestFn vector_bump(int component, double coef, const Vec4& center,
                          const Vec4& width,
                          const std::array<int, 4>& mono = {0, 0, 0, 0}) {
  return TestFn(Rank::Vector,
                {{component, make_bump_atom(coef, center, width, mono)}});
}

}  // namespace weylcharge
