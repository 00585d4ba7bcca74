#pragma once
// Minkowski geometry helpers on R^4 with signature (+,-,-,-).
// Index 0 is time; indices 1..3 are Cartesian space.

#include <algorithm>
#include <array>
#include <cmath>
#include <vector>

namespace weylcharge {

using Vec4 = std::array<double, 4>;

inline Vec4 operator+(const Vec4& a, const Vec4& b) {
  return {a[0] + b[0], a[1] + b[1], a[2] + b[2], a[3] + b[3]};
}
inline Vec4 operator-(const Vec4& a, const Vec4& b) {
  return {a[0] - b[0], a[1] - b[1], a[2] - b[2], a[3] - b[3]};
}
inline Vec4 operator*(double s, const Vec4& a) {
  return {s * a[0], s * a[1], s * a[2], s * a[3]};
}

struct Box4 {
  Vec4 lo{}, hi{};

  bool contains(const Box4& inner) const {
    for (int i = 0; i < 4; ++i)
      if (inner.lo[i] < lo[i] || inner.hi[i] > hi[i]) return false;
    return true;
  }
  Box4 hull(const Box4& o) const {
    Box4 r;
    for (int i = 0; i < 4; ++i) {
      r.lo[i] = std::min(lo[i], o.lo[i]);
      r.hi[i] = std::max(hi[i], o.hi[i]);
    }
    return r;
  }
  // Support of a convolution is contained in the Minkowski sum of supports.
  Box4 minkowski_sum(const Box4& o) const {
    Box4 r;
    for (int i = 0; i < 4; ++i) {
      r.lo[i] = lo[i] + o.lo[i];
      r.hi[i] = hi[i] + o.hi[i];
    }
    return r;
  }
};

// Largest |t_a - t_b| over the two boxes.
inline double max_time_gap(const Box4& a, const Box4& b) {
  return std::max(std::abs(a.lo[0] - b.hi[0]), std::abs(a.hi[0] - b.lo[0]));
}

// Smallest Euclidean spatial distance between the boxes (0 if they overlap).
inline double min_space_gap(const Box4& a, const Box4& b) {
  double s = 0.0;
  for (int i = 1; i < 4; ++i) {
    double g = std::max({0.0, b.lo[i] - a.hi[i], a.lo[i] - b.hi[i]});
    s += g * g;
  }
  return std::sqrt(s);
}

// True when every point of `a` is spacelike to every point of `b`.
// Spacelike separation from a region is unchanged by passing to its causal
// completion, so box-vs-box tests suffice for causally completed regions.
inline bool spacelike_separated(const Box4& a, const Box4& b) {
  return max_time_gap(a, b) < min_space_gap(a, b);
}

struct SupportRegion {
  std::vector<Box4> boxes;

  Box4 bounding_box() const {
    Box4 r = boxes.front();
    for (const auto& b : boxes) r = r.hull(b);
    return r;
  }
  bool spacelike_to(const SupportRegion& o) const {
    for (const auto& a : boxes)
      for (const auto& b : o.boxes)
        if (!spacelike_separated(a, b)) return false;
    return true;
  }
};

}  // namespace weylcharge
