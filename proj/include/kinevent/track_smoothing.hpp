#pragma once

#include <span>

#include <Eigen/Core>

#include "kinevent/types.hpp"

namespace kinevent {

/// Noise standard deviations as fractions of the current box height.
struct SmoothingParams {
  double position_noise_scale = 0.05;     // px per px of height
  double velocity_noise_scale = 0.00625;  // px/frame per px of height
};

using Mat6 = Eigen::Matrix<double, 6, 6>;
using Vec6 = Eigen::Matrix<double, 6, 1>;

struct SmoothedTrackPoint {
  std::int64_t frame_index = 0;
  double time_s = 0.0;
  Vec2 bottom_middle = Vec2::Zero();   // px
  Vec2 image_velocity = Vec2::Zero();  // px/s
  Vec2 box_size = Vec2::Zero();        // (width, height) px
  Mat6 covariance = Mat6::Zero();      // state order (cx, cy, w, h, vx, vy), per-frame units
  Eigen::Vector4d innovation = Eigen::Vector4d::Zero();  // zero for interpolated frames
  bool interpolated = false;
  std::size_t source_index = 0;  // index into the input points (last measured one)
};

/// Constant-velocity Kalman filter over (cx, cy_bottom, w, h, vx, vy).
///
/// The filter runs in frame units; velocities are exported in px/s.
class BoxKalmanFilter {
 public:
  explicit BoxKalmanFilter(SmoothingParams params) : params_(params) {}

  void initiate(const BBox& box);
  void predict();
  /// Returns the innovation (measurement minus prediction).
  Eigen::Vector4d update(const BBox& box);

  const Vec6& mean() const { return mean_; }
  const Mat6& covariance() const { return cov_; }

 private:
  SmoothingParams params_;
  Vec6 mean_ = Vec6::Zero();
  Mat6 cov_ = Mat6::Zero();
};

/// Filters one track segment. Points must be ordered by strictly increasing frame;
/// missing frames between consecutive points are filled with predict-only states.
std::vector<SmoothedTrackPoint> smooth_track(std::span<const TrackPoint> points, double fps,
                                             const SmoothingParams& params);

}  // namespace kinevent
