#pragma once

#include <array>
#include <optional>

#include "kinevent/calibration.hpp"
#include "kinevent/track_smoothing.hpp"

namespace kinevent {

/// Four ground-plane vertices in meters, counterclockwise.
struct Quadrangle {
  std::array<Vec2, 4> v;

  /// Signed area, positive for counterclockwise order.
  double signed_area() const;
  Vec2 centroid() const;
  bool is_convex(double tol = 1e-12) const;
  Quadrangle translated(const Vec2& offset) const;
};

/// Reorders the vertices counterclockwise (reverses clockwise input).
Quadrangle normalize_ccw(const Quadrangle& q);

struct GeometryParams {
  double v_orient_min = 0.3;           // m/s
  double default_vehicle_width = 1.8;  // m
};

struct Box3D {
  std::array<Vec2, 8> image_corners;  // bottom face first (counterclockwise), then top face
  Quadrangle footprint;
  double height_m = 0.0;
  bool fallback = false;  // true when the footprint came from the axis-aligned box
};

struct GroundObservation {
  std::int64_t track_id = 0;
  std::int64_t frame_index = 0;
  double time_s = 0.0;
  Vec2 position = Vec2::Zero();         // m
  Vec2 ground_velocity = Vec2::Zero();  // m/s
  Quadrangle footprint{};
  Vec2 orientation = Vec2::UnitX();  // unit ground direction used for the box
  bool orientation_valid = false;
  bool footprint_fallback = false;
};

/// Ground velocity (m/s) of an image point moving at v_img (px/s), by finite difference over dt.
Vec2 ground_velocity(const CameraModel& camera, const Vec2& p, const Vec2& v_img, double dt);

/// 3D box from the contour's tangent lines through the motion, lateral and vertical
/// vanishing points. Falls back to footprint_from_polygon_bbox when the tangents are
/// unusable (vanishing point inside the contour hull, inconsistent tangents).
Box3D build_3d_bbox(const CameraModel& camera, const Polygon& contour, const Vec2& motion_dir,
                    const GeometryParams& params = {});

/// Footprint from the bottom edge of an image box swept away from the camera by `width_m`.
Quadrangle footprint_from_bbox(const CameraModel& camera, const BBox& box, double width_m);

struct OrientationState {
  Vec2 direction = Vec2::UnitX();
  bool ever_valid = false;
};

/// Assembles the ground observation of one smoothed frame.
GroundObservation make_observation(const CameraModel& camera, const SmoothedTrackPoint& s,
                                   const Polygon* contour, OrientationState& orientation,
                                   double fps, const GeometryParams& params);

}  // namespace kinevent
