#pragma once

#include <span>
#include <utility>

#include "kinevent/ground_geometry.hpp"

namespace kinevent {

struct KinematicsParams {
  int w = 15;                  // window half-width in frames
  double v_theta_floor = 0.3;  // m/s; heading is held below this speed
};

/// Default half-width: ceil(0.5 * fps), i.e. a one-second window.
int default_window_half_width(double fps);

struct GroundState {
  std::int64_t frame_index = 0;
  double time_s = 0.0;
  double v_r = 0.0;      // m/s
  double v_theta = 0.0;  // deg, unwrapped
  double a_r = 0.0;      // m/s^2
  double a_theta = 0.0;  // deg/s
  bool window_valid = false;
};

struct PolarVelocity {
  double v_r = 0.0;
  double v_theta_deg = 0.0;  // (-180, 180]
};

PolarVelocity to_polar(const Vec2& v);

/// Wraps an angle difference into (-180, 180].
double wrap_degrees(double deg);

/// Removes +/-360 seams. Frames slower than `floor` repeat the previous heading; leading
/// slow frames take the first heading measured above the floor.
std::vector<double> unwrap_angles(std::span<const double> raw_deg, std::span<const double> speeds,
                                  double floor);

/// OLS slope (per second) of `series` over frames [t0 - w, t0 + w], frames spaced 1/fps.
/// Returns nullopt when the window does not fit inside the series.
std::optional<double> window_slope(std::span<const double> series, std::size_t t0, int w,
                                   double fps);

/// Sliding-window slopes for every frame; frames without a full window get 0.
/// Serial reference kernel.
std::vector<double> window_slopes_serial(std::span<const double> series, int w, double fps);
/// Same result as window_slopes_serial, frames split across OpenMP threads.
std::vector<double> window_slopes(std::span<const double> series, int w, double fps);

/// Polar states with accelerations for one contiguous run of observations.
std::vector<GroundState> estimate_states(std::span<const GroundObservation> observations,
                                         double fps, const KinematicsParams& params);

}  // namespace kinevent
