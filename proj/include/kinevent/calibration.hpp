#pragma once

#include <span>
#include <variant>

#include "kinevent/types.hpp"

namespace kinevent {

/// Homogeneous image point; may lie at infinity.
struct HomogeneousPoint {
  Vec3 h = Vec3::UnitZ();

  /// |w| below this (after normalising h to unit length) counts as at infinity.
  static constexpr double kInfinityTolerance = 1e-12;

  bool at_infinity() const;
  /// Dehomogenised point. Throws GeometryError(at_infinity) for points at infinity.
  Vec2 point() const;
  /// Unit image direction of a point at infinity (or of the homogeneous x,y part).
  Vec2 direction() const;
};

struct LineSegment {
  Vec2 a;
  Vec2 b;
};

struct ImageSize {
  int width = 0;
  int height = 0;
};

/// Ground segment whose image endpoints and true length are known.
struct GroundSegmentRef {
  Vec2 a;
  Vec2 b;
  double meters = 0.0;
};

struct CameraHeightRef {
  double meters = 0.0;
};

using ScaleReference = std::variant<GroundSegmentRef, CameraHeightRef>;

/// Pinhole camera observing the world ground plane Z = 0, Z pointing up.
///
/// World coordinates are in "world units"; scale() converts them to meters.
/// All public geometry functions below take and return meters.
class CameraModel {
 public:
  /// Builds from P (any overall scale/sign). Decomposes P = K[R|t].
  static CameraModel from_projection(const Mat34& P, ImageSize size, double scale = 1.0);
  static CameraModel from_krt(const Mat3& K, const Mat3& R, const Vec3& t, ImageSize size,
                              double scale = 1.0);

  const Mat3& K() const { return K_; }
  const Mat3& R() const { return R_; }
  const Vec3& t() const { return t_; }
  const Mat34& P() const { return P_; }
  ImageSize image_size() const { return size_; }
  double scale() const { return scale_; }

  /// Vanishing points of the world X and Y axes.
  const HomogeneousPoint& u() const { return u_; }
  const HomogeneousPoint& v() const { return v_; }
  /// Vertical vanishing point (image of world Z direction).
  const HomogeneousPoint& w() const { return w_; }

  /// Camera centre in world units.
  const Vec3& center() const { return center_; }
  /// Camera height above the ground in meters.
  double height_m() const { return center_.z() * scale_; }

  CameraModel with_scale(double meters_per_unit) const;

 private:
  CameraModel(const Mat3& K, const Mat3& R, const Vec3& t, ImageSize size, double scale);

  Mat3 K_;
  Mat3 R_;
  Vec3 t_;
  Mat34 P_;
  Mat3 M_inv_;  // inverse of P's left 3x3 block
  Vec3 center_;
  ImageSize size_;
  double scale_ = 1.0;
  HomogeneousPoint u_;
  HomogeneousPoint v_;
  HomogeneousPoint w_;

  friend Vec2 reproject_image_to_ground(const CameraModel&, const Vec2&);
};

/// Least-squares vanishing point of a group of image segments.
HomogeneousPoint estimate_vanishing_point(std::span<const LineSegment> segments);

/// Camera with principal point at the image centre, square pixels and zero skew.
CameraModel camera_from_vanishing_points(const Vec2& u, const Vec2& v, ImageSize size,
                                         const ScaleReference& scale_ref);

/// Rescales an existing model so that the reference maps to meters.
CameraModel apply_scale_reference(const CameraModel& camera, const ScaleReference& scale_ref);

/// Dehomogenised P * (X, 1) for a raw projection matrix; X in the units of P.
/// `depth` receives the third homogeneous coordinate.
Vec2 project_point(const Mat34& P, const Vec3& X, double* depth = nullptr);

/// World point (meters) to image pixels.
Vec2 project_world_to_image(const CameraModel& camera, const Vec3& X);

/// Same as project_world_to_image but also returns the camera-frame depth (world units).
Vec2 project_world_to_image(const CameraModel& camera, const Vec3& X, double& depth);

/// Image point to the ground plane; result in meters.
Vec2 reproject_image_to_ground(const CameraModel& camera, const Vec2& x);

/// Image of the point at infinity of ground direction d (unit 2-vector).
HomogeneousPoint vanishing_point_of_ground_direction(const CameraModel& camera, const Vec2& d);

}  // namespace kinevent
