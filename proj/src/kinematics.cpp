#include "kinevent/kinematics.hpp"

#include <cmath>
#include <numbers>

namespace kinevent {

namespace {

constexpr double kRadToDeg = 180.0 / std::numbers::pi;

bool window_fits(std::size_t n, std::size_t t0, int w) {
  return w >= 1 && t0 >= static_cast<std::size_t>(w) && t0 + static_cast<std::size_t>(w) < n;
}

// Assumes the window fits.
double slope_at(std::span<const double> y, std::size_t t0, int w, double fps) {
  const std::size_t first = t0 - static_cast<std::size_t>(w);
  const std::size_t count = 2 * static_cast<std::size_t>(w) + 1;
  double mean = 0.0;
  for (std::size_t i = 0; i < count; ++i) mean += y[first + i];
  mean /= static_cast<double>(count);
  double sxy = 0.0;
  double sxx = 0.0;
  for (int k = -w; k <= w; ++k) {
    const double t = static_cast<double>(k) / fps;
    sxy += t * (y[t0 + k] - mean);
    sxx += t * t;
  }
  return sxy / sxx;
}

}  // namespace

int default_window_half_width(double fps) {
  return std::max(1, static_cast<int>(std::ceil(0.5 * fps)));
}

PolarVelocity to_polar(const Vec2& v) {
  if (v.x() == 0.0 && v.y() == 0.0) return {};
  double theta = std::atan2(v.y(), v.x()) * kRadToDeg;
  if (theta <= -180.0) theta += 360.0;
  return {std::hypot(v.x(), v.y()), theta};
}

double wrap_degrees(double deg) {
  double r = std::fmod(deg, 360.0);
  if (r > 180.0) r -= 360.0;
  if (r <= -180.0) r += 360.0;
  return r;
}

std::vector<double> unwrap_angles(std::span<const double> raw_deg, std::span<const double> speeds,
                                  double floor) {
  std::vector<double> out(raw_deg.size());
  if (raw_deg.empty()) return out;

  std::size_t first_moving = raw_deg.size();
  for (std::size_t i = 0; i < raw_deg.size(); ++i) {
    if (speeds[i] >= floor) {
      first_moving = i;
      break;
    }
  }
  if (first_moving == raw_deg.size()) {
    // Never above the floor: no heading information at all.
    std::fill(out.begin(), out.end(), raw_deg[0]);
    return out;
  }
  for (std::size_t i = 0; i <= first_moving; ++i) out[i] = raw_deg[first_moving];
  double prev_raw = raw_deg[first_moving];
  for (std::size_t i = first_moving + 1; i < raw_deg.size(); ++i) {
    if (speeds[i] < floor) {
      out[i] = out[i - 1];
      continue;
    }
    out[i] = out[i - 1] + wrap_degrees(raw_deg[i] - prev_raw);
    prev_raw = raw_deg[i];
  }
  return out;
}

std::optional<double> window_slope(std::span<const double> series, std::size_t t0, int w,
                                   double fps) {
  if (!window_fits(series.size(), t0, w)) return std::nullopt;
  return slope_at(series, t0, w, fps);
}

std::vector<double> window_slopes_serial(std::span<const double> series, int w, double fps) {
  std::vector<double> out(series.size(), 0.0);
  for (std::size_t t0 = 0; t0 < series.size(); ++t0) {
    if (window_fits(series.size(), t0, w)) out[t0] = slope_at(series, t0, w, fps);
  }
  return out;
}

std::vector<double> window_slopes(std::span<const double> series, int w, double fps) {
  const auto n = static_cast<std::ptrdiff_t>(series.size());
  std::vector<double> out(series.size(), 0.0);
#pragma omp parallel for schedule(static) if (n > 8192)
  for (std::ptrdiff_t t0 = 0; t0 < n; ++t0) {
    const auto i = static_cast<std::size_t>(t0);
    if (window_fits(series.size(), i, w)) out[i] = slope_at(series, i, w, fps);
  }
  return out;
}

std::vector<GroundState> estimate_states(std::span<const GroundObservation> observations,
                                         double fps, const KinematicsParams& params) {
  const std::size_t n = observations.size();
  std::vector<double> speed(n), raw_theta(n);
  for (std::size_t i = 0; i < n; ++i) {
    const PolarVelocity p = to_polar(observations[i].ground_velocity);
    speed[i] = p.v_r;
    raw_theta[i] = p.v_theta_deg;
  }
  const std::vector<double> theta = unwrap_angles(raw_theta, speed, params.v_theta_floor);
  const std::vector<double> a_r = window_slopes_serial(speed, params.w, fps);
  const std::vector<double> a_theta = window_slopes_serial(theta, params.w, fps);

  std::vector<GroundState> states(n);
  for (std::size_t i = 0; i < n; ++i) {
    GroundState& s = states[i];
    s.frame_index = observations[i].frame_index;
    s.time_s = observations[i].time_s;
    s.v_r = speed[i];
    s.v_theta = theta[i];
    s.a_r = a_r[i];
    s.a_theta = a_theta[i];
    s.window_valid = window_fits(n, i, params.w);
  }
  return states;
}

}  // namespace kinevent
