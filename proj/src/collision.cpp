#include "kinevent/collision.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace kinevent {

namespace {

struct PairResult {
  std::size_t i = 0;
  std::size_t j = 0;
  bool pruned = true;
  std::optional<double> overlap_at;
  double distance_now = 0.0;
};

double circumradius(const GroundObservation& o) {
  double r = 0.0;
  for (const auto& p : o.footprint.v) r = std::max(r, (p - o.position).norm());
  return r;
}

std::vector<PairResult> evaluate_pairs(std::span<const GroundObservation> frame,
                                       const CollisionParams& params, bool prune,
                                       bool parallel = true) {
  std::vector<PairResult> pairs;
  for (std::size_t i = 0; i < frame.size(); ++i) {
    for (std::size_t j = i + 1; j < frame.size(); ++j) {
      PairResult pr;
      pr.i = i;
      pr.j = j;
      pairs.push_back(pr);
    }
  }
  const auto n = static_cast<std::ptrdiff_t>(pairs.size());
#pragma omp parallel for schedule(dynamic, 16) if (parallel && n > 256)
  for (std::ptrdiff_t k = 0; k < n; ++k) {
    PairResult& pr = pairs[static_cast<std::size_t>(k)];
    const GroundObservation& a = frame[pr.i];
    const GroundObservation& b = frame[pr.j];
    if (prune && can_prune_pair(a, b, params)) continue;
    pr.pruned = false;
    pr.overlap_at = first_predicted_overlap(a, b, params);
    try {
      pr.distance_now = quadrangle_distance(a.footprint, b.footprint);
    } catch (const GeometryError&) {
      pr.distance_now = std::numeric_limits<double>::quiet_NaN();
    }
  }
  return pairs;
}

CollisionAlert make_alert(const GroundObservation& a, const GroundObservation& b,
                          const PairResult& pr) {
  CollisionAlert alert;
  alert.t_s = a.time_s;
  alert.track_a = std::min(a.track_id, b.track_id);
  alert.track_b = std::max(a.track_id, b.track_id);
  alert.horizon_s = *pr.overlap_at;
  alert.min_distance_now = pr.distance_now;
  return alert;
}

}  // namespace

double point_edge_distance(const Vec2& p, const Vec2& a, const Vec2& b) {
  const Vec2 ab = b - a;
  const double len2 = ab.squaredNorm();
  if (!(len2 > 0.0)) return (p - a).norm();
  const double t = std::clamp((p - a).dot(ab) / len2, 0.0, 1.0);
  return (a + t * ab - p).norm();
}

double point_quadrangle_distance(const Vec2& p, const Quadrangle& q) {
  double d = std::numeric_limits<double>::infinity();
  for (int k = 0; k < 4; ++k) d = std::min(d, point_edge_distance(p, q.v[k], q.v[(k + 1) % 4]));
  return d;
}

bool quadrangles_overlap(const Quadrangle& q1, const Quadrangle& q2) {
  for (const Quadrangle* q : {&q1, &q2}) {
    for (int k = 0; k < 4; ++k) {
      const Vec2 e = q->v[(k + 1) % 4] - q->v[k];
      const Vec2 axis(-e.y(), e.x());
      double min1 = std::numeric_limits<double>::infinity(), max1 = -min1;
      double min2 = min1, max2 = -min1;
      for (int m = 0; m < 4; ++m) {
        const double p1 = axis.dot(q1.v[m]);
        const double p2 = axis.dot(q2.v[m]);
        min1 = std::min(min1, p1);
        max1 = std::max(max1, p1);
        min2 = std::min(min2, p2);
        max2 = std::max(max2, p2);
      }
      if (max1 < min2 || max2 < min1) return false;
    }
  }
  return true;
}

double quadrangle_distance(const Quadrangle& q1, const Quadrangle& q2) {
  if (std::abs(q1.signed_area()) < 1e-12 || std::abs(q2.signed_area()) < 1e-12) {
    throw GeometryError(GeometryErrc::degenerate, "degenerate quadrangle");
  }
  if (quadrangles_overlap(q1, q2)) return 0.0;
  double d = std::numeric_limits<double>::infinity();
  for (const auto& p : q1.v) d = std::min(d, point_quadrangle_distance(p, q2));
  for (const auto& p : q2.v) d = std::min(d, point_quadrangle_distance(p, q1));
  return d;
}

Vec2 predict_center(const Vec2& p, const Vec2& v, double t_ahead) { return p + v * t_ahead; }

bool can_prune_pair(const GroundObservation& a, const GroundObservation& b,
                    const CollisionParams& params) {
  const double reach = params.horizon_s * (a.ground_velocity.norm() + b.ground_velocity.norm()) +
                       circumradius(a) + circumradius(b);
  return (a.position - b.position).norm() > reach;
}

std::optional<double> first_predicted_overlap(const GroundObservation& a,
                                              const GroundObservation& b,
                                              const CollisionParams& params) {
  const auto steps = static_cast<int>(std::floor(params.horizon_s / params.step_s + 1e-9));
  for (int k = 0; k <= steps; ++k) {
    const double t = k * params.step_s;
    const Quadrangle qa =
        a.footprint.translated(predict_center(a.position, a.ground_velocity, t) - a.position);
    const Quadrangle qb =
        b.footprint.translated(predict_center(b.position, b.ground_velocity, t) - b.position);
    if (quadrangles_overlap(qa, qb)) return t;
  }
  return std::nullopt;
}

std::vector<CollisionAlert> detect_collisions(std::span<const GroundObservation> frame,
                                              const CollisionParams& params, bool prune) {
  std::vector<CollisionAlert> alerts;
  for (const PairResult& pr : evaluate_pairs(frame, params, prune)) {
    if (pr.overlap_at) alerts.push_back(make_alert(frame[pr.i], frame[pr.j], pr));
  }
  return alerts;
}

std::vector<CollisionAlert> detect_collisions_serial(std::span<const GroundObservation> frame,
                                                     const CollisionParams& params, bool prune) {
  std::vector<CollisionAlert> alerts;
  for (const PairResult& pr : evaluate_pairs(frame, params, prune, false)) {
    if (pr.overlap_at) alerts.push_back(make_alert(frame[pr.i], frame[pr.j], pr));
  }
  return alerts;
}

std::vector<CollisionAlert> CollisionMonitor::update(std::span<const GroundObservation> frame,
                                                     std::vector<PairDistance>* distances) {
  std::vector<CollisionAlert> alerts;
  for (const PairResult& pr : evaluate_pairs(frame, params_, true)) {
    const GroundObservation& a = frame[pr.i];
    const GroundObservation& b = frame[pr.j];
    const auto key = std::minmax(a.track_id, b.track_id);
    if (distances != nullptr && !pr.pruned) {
      distances->push_back({a.time_s, key.first, key.second, pr.distance_now});
    }
    if (!pr.overlap_at) {
      in_episode_.erase(key);
      continue;
    }
    if (in_episode_.insert(key).second) alerts.push_back(make_alert(a, b, pr));
  }
  return alerts;
}

}  // namespace kinevent
