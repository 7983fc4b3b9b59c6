#pragma once

#include <iosfwd>
#include <string>

#include "kinevent/collision.hpp"
#include "kinevent/event_detection.hpp"
#include "kinevent/kinematics.hpp"
#include "kinevent/track_smoothing.hpp"

namespace kinevent {

/// Every tunable of the pipeline. Loaded from a `key = value` file whose keys are the
/// field names below (nested parameter structs are flattened).
struct PipelineConfig {
  double fps = 30.0;
  int max_track_gap_frames = 10;
  std::optional<int> w;  // defaults to ceil(0.5 * fps)
  double v_theta_floor = 0.3;
  SmoothingParams smoothing;
  GeometryParams geometry;
  DetectorParams detector;
  CollisionParams collision;

  KinematicsParams kinematics() const;
  /// Throws std::invalid_argument on inconsistent values.
  void validate() const;
};

/// Parses `key = value` lines; `#` starts a comment. Unknown keys are errors.
PipelineConfig parse_config(std::istream& in);
PipelineConfig load_config_file(const std::string& path);

/// Inverse of parse_config (all keys, including defaults).
std::string format_config(const PipelineConfig& config);

}  // namespace kinevent
