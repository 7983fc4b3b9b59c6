#include "kinevent/track_smoothing.hpp"

#include <Eigen/Dense>

namespace kinevent {

namespace {

using Mat46 = Eigen::Matrix<double, 4, 6>;

Eigen::Vector4d measurement(const BBox& b) {
  const Vec2 bm = b.bottom_middle();
  return {bm.x(), bm.y(), b.width, b.height};
}

Mat46 observation_matrix() {
  Mat46 H = Mat46::Zero();
  H.leftCols<4>().setIdentity();
  return H;
}

}  // namespace

void BoxKalmanFilter::initiate(const BBox& box) {
  mean_.setZero();
  mean_.head<4>() = measurement(box);
  const double h = box.height;
  const double sp = 2.0 * params_.position_noise_scale * h;
  const double sv = 10.0 * params_.velocity_noise_scale * h;
  Vec6 stds;
  stds << sp, sp, sp, sp, sv, sv;
  cov_ = stds.array().square().matrix().asDiagonal();
}

void BoxKalmanFilter::predict() {
  Mat6 F = Mat6::Identity();
  F(0, 4) = 1.0;
  F(1, 5) = 1.0;
  const double h = mean_(3);
  const double sp = params_.position_noise_scale * h;
  const double sv = params_.velocity_noise_scale * h;
  Vec6 stds;
  stds << sp, sp, sp, sp, sv, sv;
  const Mat6 Q = stds.array().square().matrix().asDiagonal();
  mean_ = F * mean_;
  cov_ = F * cov_ * F.transpose() + Q;
}

Eigen::Vector4d BoxKalmanFilter::update(const BBox& box) {
  const Mat46 H = observation_matrix();
  const double sp = params_.position_noise_scale * mean_(3);
  const Eigen::Matrix4d Rm = Eigen::Vector4d::Constant(sp * sp).asDiagonal();
  const Eigen::Vector4d innovation = measurement(box) - H * mean_;
  const Eigen::Matrix4d S = H * cov_ * H.transpose() + Rm;
  const Eigen::LLT<Eigen::Matrix4d> llt(S);
  const Eigen::Matrix<double, 6, 4> gain = llt.solve(H * cov_).transpose();
  mean_ += gain * innovation;
  // Joseph form keeps the covariance symmetric positive semidefinite.
  const Mat6 IKH = Mat6::Identity() - gain * H;
  cov_ = IKH * cov_ * IKH.transpose() + gain * Rm * gain.transpose();
  cov_ = 0.5 * (cov_ + cov_.transpose()).eval();
  return innovation;
}

std::vector<SmoothedTrackPoint> smooth_track(std::span<const TrackPoint> points, double fps,
                                             const SmoothingParams& params) {
  std::vector<SmoothedTrackPoint> out;
  if (points.empty()) return out;
  out.reserve(points.size());

  BoxKalmanFilter kf(params);
  auto emit = [&](std::int64_t frame, std::size_t src, bool interpolated,
                  const Eigen::Vector4d& innovation) {
    const Vec6& m = kf.mean();
    SmoothedTrackPoint s;
    s.frame_index = frame;
    s.time_s = static_cast<double>(frame) / fps;
    s.bottom_middle = m.head<2>();
    s.box_size = m.segment<2>(2);
    s.image_velocity = m.tail<2>() * fps;
    s.covariance = kf.covariance();
    s.innovation = innovation;
    s.interpolated = interpolated;
    s.source_index = src;
    out.push_back(s);
  };

  kf.initiate(points[0].bbox);
  emit(points[0].frame_index, 0, false, Eigen::Vector4d::Zero());
  for (std::size_t i = 1; i < points.size(); ++i) {
    const std::int64_t prev = points[i - 1].frame_index;
    const std::int64_t cur = points[i].frame_index;
    for (std::int64_t f = prev + 1; f < cur; ++f) {
      kf.predict();
      emit(f, i - 1, true, Eigen::Vector4d::Zero());
    }
    kf.predict();
    const Eigen::Vector4d innovation = kf.update(points[i].bbox);
    emit(cur, i, false, innovation);
  }
  return out;
}

}  // namespace kinevent
