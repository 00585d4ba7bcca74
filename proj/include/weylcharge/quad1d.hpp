#pragma once
// One-dimensional quadrature utilities: cached Gauss-Legendre rules,
// panel-doubling adaptive integration, and Chebyshev panel interpolants
// used to tabulate smooth transforms.

#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <map>
#include <memory>
#include <stdexcept>
#include <vector>

namespace weylcharge {

using cplx = std::complex<double>;

struct QuadratureError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct GaussLegendreRule {
  std::vector<double> nodes;    // on [-1, 1]
  std::vector<double> weights;
};

// Nodes via Newton iteration on Legendre polynomials; cached per order.
inline const GaussLegendreRule& gauss_legendre(int n) {
  static std::map<int, GaussLegendreRule> cache;
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  GaussLegendreRule r;
  r.nodes.resize(n);
  r.weights.resize(n);
  for (int i = 0; i < n; ++i) {
    double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      double dp = n * (x * p1 - p0) / (x * x - 1.0);
      double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= n; ++k) {
      double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    double dp = n * (x * p1 - p0) / (x * x - 1.0);
    r.nodes[n - 1 - i] = x;
    r.weights[n - 1 - i] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
  return cache.emplace(n, std::move(r)).first->second;
}

namespace detail {

template <class T, class F>
T panel_sum(const F& f, double a, double b, int panels, int order) {
  const auto& rule = gauss_legendre(order);
  T total{};
  double h = (b - a) / panels;
  for (int p = 0; p < panels; ++p) {
    double lo = a + p * h;
    double mid = lo + 0.5 * h;
    T acc{};
    for (int i = 0; i < order; ++i)
      acc += rule.weights[i] * f(mid + 0.5 * h * rule.nodes[i]);
    total += acc * (0.5 * h);
  }
  return total;
}

}  // namespace detail

// Panel-doubling adaptive integration.  `scale_hint` sets the absolute floor
// below which agreement is accepted regardless of relative error.
template <class T, class F>
T integrate_adaptive(const F& f, double a, double b, double rel_tol = 1e-10,
                     double scale_hint = 0.0, int init_panels = 1,
                     int order = 16, int max_doublings = 14) {
  if (!(b > a)) return T{};
  T prev = detail::panel_sum<T>(f, a, b, init_panels, order);
  int panels = init_panels;
  for (int d = 0; d < max_doublings; ++d) {
    panels *= 2;
    T cur = detail::panel_sum<T>(f, a, b, panels, order);
    double err = std::abs(cur - prev);
    double floor = rel_tol * std::max(std::abs(cur), scale_hint) + 1e-300;
    if (err <= floor || err <= 1e-16 * (std::abs(cur) + scale_hint) + 1e-300)
      return cur;
    prev = cur;
  }
  return prev;
}

// ---------------------------------------------------------------------------
// Chebyshev panel interpolant for smooth real->complex functions on [0, A].
// Panels are appended lazily as larger arguments are requested.

class ChebPanelInterp {
 public:
  ChebPanelInterp(std::function<cplx(double)> f, double panel_width,
                  int order = 20)
      : f_(std::move(f)), width_(panel_width), order_(order) {}

  cplx operator()(double a) {
    bool conj = false;
    if (a < 0) {
      a = -a;
      conj = true;  // caller guarantees f(-a) = conj(f(a))
    }
    std::size_t idx = static_cast<std::size_t>(a / width_);
    while (idx >= panels_.size()) build_panel(panels_.size());
    const auto& c = panels_[idx];
    // Clenshaw over Chebyshev coefficients on the panel.
    double lo = idx * width_;
    double t = 2.0 * (a - lo) / width_ - 1.0;
    cplx b1{}, b2{};
    for (int k = order_ - 1; k >= 1; --k) {
      cplx b0 = c[k] + 2.0 * t * b1 - b2;
      b2 = b1;
      b1 = b0;
    }
    cplx v = c[0] + t * b1 - b2;
    return conj ? std::conj(v) : v;
  }

 private:
  void build_panel(std::size_t idx) {
    double lo = idx * width_, hi = lo + width_;
    std::vector<cplx> vals(order_);
    for (int j = 0; j < order_; ++j) {
      double t = std::cos(M_PI * (j + 0.5) / order_);
      vals[j] = f_(0.5 * (lo + hi) + 0.5 * (hi - lo) * t);
    }
    std::vector<cplx> coef(order_);
    for (int k = 0; k < order_; ++k) {
      cplx s{};
      for (int j = 0; j < order_; ++j)
        s += vals[j] * std::cos(M_PI * k * (j + 0.5) / order_);
      coef[k] = s * (2.0 / order_);
    }
    coef[0] *= 0.5;
    panels_.push_back(std::move(coef));
  }

  std::function<cplx(double)> f_;
  double width_;
  int order_;
  std::vector<std::vector<cplx>> panels_;
};

// Kahan-compensated sequential sum for deterministic reductions.
class KahanSum {
 public:
  void add(double x) {
    double y = x - c_;
    double t = s_ + y;
    c_ = (t - s_) - y;
    s_ = t;
  }
  double value() const { return s_; }

 private:
  double s_ = 0.0, c_ = 0.0;
};

}  // namespace weylcharge
