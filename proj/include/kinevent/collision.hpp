#pragma once

#include <set>
#include <span>
#include <utility>

#include "kinevent/ground_geometry.hpp"

namespace kinevent {

struct CollisionParams {
  double horizon_s = 1.0;
  double step_s = 0.1;
};

struct CollisionAlert {
  double t_s = 0.0;  // detection time
  std::int64_t track_a = 0;
  std::int64_t track_b = 0;
  double horizon_s = 0.0;  // prediction offset of the first overlap
  double min_distance_now = 0.0;
};

/// Current footprint distance of one vehicle pair.
struct PairDistance {
  double t_s = 0.0;
  std::int64_t track_a = 0;
  std::int64_t track_b = 0;
  double distance_m = 0.0;
};

/// Distance from p to the closed segment [a, b].
double point_edge_distance(const Vec2& p, const Vec2& a, const Vec2& b);

/// Minimum over the four edges of q.
double point_quadrangle_distance(const Vec2& p, const Quadrangle& q);

/// Separating-axis test over the eight edge normals; touching counts as overlap.
bool quadrangles_overlap(const Quadrangle& q1, const Quadrangle& q2);

/// Vertex-to-edge minimum distance, 0 when the quadrangles overlap.
/// Throws GeometryError(degenerate) for zero-area quadrangles.
double quadrangle_distance(const Quadrangle& q1, const Quadrangle& q2);

/// Constant-velocity position after t_ahead seconds.
Vec2 predict_center(const Vec2& p, const Vec2& v, double t_ahead);

/// Smallest swept offset in {0, step, 2 step, ..., horizon} at which the two predicted
/// footprints overlap, or nullopt.
std::optional<double> first_predicted_overlap(const GroundObservation& a,
                                              const GroundObservation& b,
                                              const CollisionParams& params);

/// True when the pair cannot overlap within the horizon.
bool can_prune_pair(const GroundObservation& a, const GroundObservation& b,
                    const CollisionParams& params);

/// One alert per pair with a predicted overlap in this frame (no cross-frame state).
/// `prune` disables the distance pre-check when false.
std::vector<CollisionAlert> detect_collisions(std::span<const GroundObservation> frame,
                                              const CollisionParams& params, bool prune = true);

/// Single-threaded reference for detect_collisions; identical output.
std::vector<CollisionAlert> detect_collisions_serial(std::span<const GroundObservation> frame,
                                                     const CollisionParams& params,
                                                     bool prune = true);

/// Cross-frame alert deduplication: a pair alerts once per contiguous overlap episode and
/// re-arms only after a sweep that shows no overlap.
class CollisionMonitor {
 public:
  explicit CollisionMonitor(CollisionParams params) : params_(params) {}

  /// Observations must share one frame; frames must be fed in time order.
  std::vector<CollisionAlert> update(std::span<const GroundObservation> frame,
                                     std::vector<PairDistance>* distances = nullptr);

 private:
  CollisionParams params_;
  std::set<std::pair<std::int64_t, std::int64_t>> in_episode_;
};

}  // namespace kinevent
