#pragma once

#include <cstdint>
#include <string>

#include "kinevent/calibration.hpp"
#include "kinevent/evaluation.hpp"
#include "kinevent/ground_geometry.hpp"

namespace kinevent {

struct Waypoint {
  double t = 0.0;  // s
  Vec2 p = Vec2::Zero();  // m, ground plane
};

/// A cuboid vehicle following a piecewise-linear ground path.
struct VehicleScript {
  std::int64_t track_id = 0;
  VehicleClass class_label = VehicleClass::car;
  double length = 4.5;  // m
  double width = 1.8;   // m
  double height = 1.5;  // m
  std::vector<Waypoint> waypoints;
};

struct SyntheticScenario {
  explicit SyntheticScenario(CameraModel cam) : camera(std::move(cam)) {}

  CameraModel camera;
  double fps = 30.0;
  double noise_px = 0.0;  // sigma of the Gaussian added to every box edge / contour vertex
  bool emit_contours = true;
  std::vector<VehicleScript> vehicles;
  std::vector<EventRecord> expected_events;

  /// Throws std::invalid_argument on non-increasing waypoint times or bad dimensions.
  void validate() const;
};

struct VehiclePose {
  Vec2 position = Vec2::Zero();  // footprint centre
  Vec2 heading = Vec2::UnitX();
  Vec2 velocity = Vec2::Zero();
};

/// Pose at time t; nullopt outside the waypoint time range.
std::optional<VehiclePose> pose_at(const VehicleScript& v, double t);

/// Ground footprint of the vehicle at a pose, counterclockwise.
Quadrangle vehicle_footprint(const VehicleScript& v, const VehiclePose& pose);

/// Noise-free image box (and optionally the convex contour) of the vehicle at time t;
/// nullopt when the vehicle is not fully inside the image or in front of the camera.
std::optional<BBox> project_vehicle(const CameraModel& camera, const VehicleScript& v, double t,
                                    Polygon* contour = nullptr);

/// Track points for every visible frame, ordered by (track_id, frame). Deterministic per seed.
std::vector<TrackPoint> generate_scenario(const SyntheticScenario& scenario, std::uint64_t seed);

/// Expected events as annotations with noise-free per-frame boxes.
std::vector<GroundTruthEvent> ground_truth_events(const SyntheticScenario& scenario,
                                                  const std::string& video_id);

/// Builds a vehicle script from a sequence of manoeuvres, recording the scripted events.
class ManeuverBuilder {
 public:
  ManeuverBuilder(std::int64_t track_id, const Vec2& start, double heading_deg, double t0,
                  double speed = 0.0);

  ManeuverBuilder& dimensions(double length, double width, double height);
  ManeuverBuilder& vehicle_class(VehicleClass c);
  /// Constant speed along the current heading.
  ManeuverBuilder& cruise(double duration_s);
  /// Circular arc at constant speed; positive angles turn left (counterclockwise).
  ManeuverBuilder& turn(double angle_deg, double radius_m);
  /// Linear speed change along the current heading.
  ManeuverBuilder& change_speed(double target_mps, double duration_s);
  /// Standing still (speed must be zero).
  ManeuverBuilder& wait(double duration_s);

  double time() const { return t_; }
  const Vec2& position() const { return p_; }
  VehicleScript script() const { return script_; }
  const std::vector<EventRecord>& events() const { return events_; }

 private:
  void sample(double t, const Vec2& p);

  VehicleScript script_;
  std::vector<EventRecord> events_;
  Vec2 p_;
  double heading_rad_;
  double t_;
  double speed_;
};

}  // namespace kinevent
