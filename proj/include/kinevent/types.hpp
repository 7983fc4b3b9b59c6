#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

namespace kinevent {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Vec4 = Eigen::Vector4d;
using Mat3 = Eigen::Matrix3d;
using Mat34 = Eigen::Matrix<double, 3, 4>;

/// Closed polygon, vertices in order, last vertex implicitly joined to the first.
using Polygon = std::vector<Vec2>;

/// Axis-aligned image box in pixels.
struct BBox {
  double left = 0.0;
  double top = 0.0;
  double width = 0.0;
  double height = 0.0;

  double right() const { return left + width; }
  double bottom() const { return top + height; }
  double area() const { return width * height; }
  Vec2 bottom_middle() const { return {left + 0.5 * width, top + height}; }

  friend bool operator==(const BBox&, const BBox&) = default;
};

enum class VehicleClass { car, bus, truck };

std::string_view to_string(VehicleClass c);
std::optional<VehicleClass> vehicle_class_from_string(std::string_view s);

/// One 2D detection of a tracked vehicle.
struct TrackPoint {
  std::int64_t frame_index = 0;
  double time_s = 0.0;
  std::int64_t track_id = 0;
  VehicleClass class_label = VehicleClass::car;
  double confidence = 1.0;
  BBox bbox;
  std::optional<Polygon> contour;
};

enum class EventType { turn_left, turn_right, u_turn, start, stop };

inline constexpr EventType kAllEventTypes[] = {EventType::turn_left, EventType::turn_right,
                                               EventType::u_turn, EventType::start,
                                               EventType::stop};

std::string_view to_string(EventType t);
std::optional<EventType> event_type_from_string(std::string_view s);

inline bool is_turning(EventType t) {
  return t == EventType::turn_left || t == EventType::turn_right || t == EventType::u_turn;
}

/// A detected (or scripted) vehicle action.
struct EventRecord {
  EventType type = EventType::turn_left;
  std::int64_t track_id = 0;
  double t_s = 0.0;
  double t_e = 0.0;
  std::optional<double> theta_deg;  // turning events only
  std::optional<double> v_start;    // linear events only
  std::optional<double> v_end;      // linear events only
  double score = 0.0;
  std::string video_id;  // empty unless the record came from a multi-video source
};

enum class GeometryErrc {
  horizon,        // ray parallel to the ground plane
  behind_camera,  // ray meets the plane behind the camera
  at_infinity,    // point projects to infinity
  degenerate,     // degenerate input (collinear lines, zero-area polygon, ...)
  precondition,   // documented precondition violated
  invalid_model,  // camera parameters violate model invariants
};

class GeometryError : public std::runtime_error {
 public:
  GeometryError(GeometryErrc code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  GeometryErrc code() const noexcept { return code_; }

 private:
  GeometryErrc code_;
};

/// Input rejected while reading an external file.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace kinevent
