#pragma once

#include <functional>
#include <span>

#include "kinevent/kinematics.hpp"

namespace kinevent {

/// The eleven thresholds of the turning and linear detectors (SI units, degrees).
struct DetectorParams {
  double a_theta_trigger = 10.0;  // deg/s
  double a_theta_border = 4.0;    // deg/s
  double v_turn_min = 0.5;        // m/s
  double t_turn_min = 1.0;        // s
  double theta_min = 30.0;        // deg
  double theta_max = 135.0;       // deg
  double a_r_trigger = 1.0;       // m/s^2
  double a_r_border = 0.4;        // m/s^2
  double t_linear_min = 1.0;      // s
  double v_stop_max = 0.3;        // m/s
  double v_move_min = 1.0;        // m/s

  /// Throws std::invalid_argument when the ordering constraints between thresholds fail.
  void validate() const;
};

/// Closed frame-index interval [first, last].
struct FrameInterval {
  std::size_t first = 0;
  std::size_t last = 0;
  friend bool operator==(const FrameInterval&, const FrameInterval&) = default;
};

/// Trigger/border state machine. An interval opens on a trigger frame, extends back over
/// the contiguous border-true frames (never past the previous interval) and forward while
/// the border holds.
std::vector<FrameInterval> run_trigger_machine(std::span<const bool> trigger,
                                               std::span<const bool> border);

std::vector<FrameInterval> run_trigger_machine(
    std::span<const GroundState> series, const std::function<bool(const GroundState&)>& trigger,
    const std::function<bool(const GroundState&)>& border);

std::vector<EventRecord> detect_turning(std::span<const GroundState> series,
                                        const DetectorParams& params, std::int64_t track_id = 0);

std::vector<EventRecord> detect_linear(std::span<const GroundState> series,
                                       const DetectorParams& params, std::int64_t track_id = 0);

/// Heuristic confidence in [0, 1].
double score_event(const EventRecord& e, const DetectorParams& params);

}  // namespace kinevent
