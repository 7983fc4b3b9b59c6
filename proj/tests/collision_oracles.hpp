#pragma once
// Independent geometry oracles for the quadrangle distance and overlap tests.

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "kinevent/collision.hpp"

namespace kinevent::testing {

// Random convex quadrangle: four sorted angles on a rotated ellipse.
inline Quadrangle random_quad(std::mt19937_64& rng, const Vec2& centre, double scale) {
  std::uniform_real_distribution<double> u(0.0, 2.0 * std::numbers::pi), ax(0.4, 1.0);
  for (;;) {
    std::array<double, 4> a{u(rng), u(rng), u(rng), u(rng)};
    std::sort(a.begin(), a.end());
    const double rx = scale * ax(rng), ry = scale * ax(rng), rot = u(rng);
    const Vec2 ex(std::cos(rot), std::sin(rot)), ey(-ex.y(), ex.x());
    Quadrangle q;
    for (int i = 0; i < 4; ++i) {
      q.v[i] = centre + rx * std::cos(a[i]) * ex + ry * std::sin(a[i]) * ey;
    }
    // Reject slivers so the oracles stay well conditioned.
    if (q.signed_area() > 0.15 * scale * scale && q.is_convex(1e-6)) return q;
  }
}

inline double seg_dist_oracle(const Vec2& p, const Vec2& a, const Vec2& b) {
  // Written independently: project, clamp by cases.
  const Vec2 d = b - a;
  const double t = (p - a).dot(d) / d.dot(d);
  if (t <= 0) return (p - a).norm();
  if (t >= 1) return (p - b).norm();
  return std::abs(d.x() * (p - a).y() - d.y() * (p - a).x()) / d.norm();
}

// Samples every edge of `from` densely and measures to the boundary of `to`.
inline double sampled_distance(const Quadrangle& from, const Quadrangle& to, int samples) {
  double best = std::numeric_limits<double>::infinity();
  for (int e = 0; e < 4; ++e) {
    const Vec2 a = from.v[e], b = from.v[(e + 1) % 4];
    const int n = samples / 4;
    for (int k = 0; k <= n; ++k) {
      const Vec2 p = a + (b - a) * (static_cast<double>(k) / n);
      for (int f = 0; f < 4; ++f) best = std::min(best, seg_dist_oracle(p, to.v[f], to.v[(f + 1) % 4]));
    }
  }
  return best;
}

inline bool inside_convex(const Vec2& p, const Quadrangle& q) {
  for (int i = 0; i < 4; ++i) {
    const Vec2 e = q.v[(i + 1) % 4] - q.v[i];
    if (e.x() * (p - q.v[i]).y() - e.y() * (p - q.v[i]).x() < 0) return false;
  }
  return true;
}

// 1 cm grid over the intersection of the two bounding boxes.
inline bool raster_overlap(const Quadrangle& a, const Quadrangle& b) {
  Vec2 lo(-1e300, -1e300), hi(1e300, 1e300);
  for (const Quadrangle* q : {&a, &b}) {
    Vec2 qlo = q->v[0], qhi = q->v[0];
    for (const auto& p : q->v) {
      qlo = qlo.cwiseMin(p);
      qhi = qhi.cwiseMax(p);
    }
    lo = lo.cwiseMax(qlo);
    hi = hi.cwiseMin(qhi);
  }
  if (lo.x() > hi.x() || lo.y() > hi.y()) return false;
  constexpr double h = 0.01;
  for (double x = lo.x(); x <= hi.x(); x += h) {
    for (double y = lo.y(); y <= hi.y(); y += h) {
      const Vec2 p(x, y);
      if (inside_convex(p, a) && inside_convex(p, b)) return true;
    }
  }
  return false;
}

// Largest signed gap along the eight edge normals (negative = penetration depth).
inline double axis_separation(const Quadrangle& a, const Quadrangle& b) {
  double best = -std::numeric_limits<double>::infinity();
  for (const Quadrangle* q : {&a, &b}) {
    for (int k = 0; k < 4; ++k) {
      const Vec2 e = (q->v[(k + 1) % 4] - q->v[k]).normalized();
      const Vec2 n(-e.y(), e.x());
      double min1 = 1e300, max1 = -1e300, min2 = 1e300, max2 = -1e300;
      for (int m = 0; m < 4; ++m) {
        min1 = std::min(min1, n.dot(a.v[m]));
        max1 = std::max(max1, n.dot(a.v[m]));
        min2 = std::min(min2, n.dot(b.v[m]));
        max2 = std::max(max2, n.dot(b.v[m]));
      }
      best = std::max(best, std::max(min2 - max1, min1 - max2));
    }
  }
  return best;
}

}  // namespace kinevent::testing
