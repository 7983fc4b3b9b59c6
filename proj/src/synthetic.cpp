#include "kinevent/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

#include "kinevent/ground_geometry.hpp"

namespace kinevent {

namespace {

constexpr double kSampleDt = 0.02;  // s between builder waypoints
constexpr double kDegToRad = std::numbers::pi / 180.0;

// Default classification thresholds used to label scripted manoeuvres.
constexpr double kScriptThetaMax = 135.0;
constexpr double kScriptStopMax = 0.3;
constexpr double kScriptMoveMin = 1.0;

double cross2(const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); }

Polygon hull_of(Polygon pts) {
  std::sort(pts.begin(), pts.end(), [](const Vec2& a, const Vec2& b) {
    return a.x() < b.x() || (a.x() == b.x() && a.y() < b.y());
  });
  Polygon hull(2 * pts.size());
  std::size_t k = 0;
  for (const auto& p : pts) {
    while (k >= 2 && cross2(hull[k - 1] - hull[k - 2], p - hull[k - 2]) <= 0) --k;
    hull[k++] = p;
  }
  for (std::size_t i = pts.size() - 1, t = k + 1; i-- > 0;) {
    while (k >= t && cross2(hull[k - 1] - hull[k - 2], pts[i] - hull[k - 2]) <= 0) --k;
    hull[k++] = pts[i];
  }
  hull.resize(k - 1);
  return hull;
}

// Direction of the first non-degenerate segment at or after index i, scanning backwards
// when none exists.
Vec2 segment_heading(const std::vector<Waypoint>& w, std::size_t i) {
  for (std::size_t k = i; k + 1 < w.size(); ++k) {
    const Vec2 d = w[k + 1].p - w[k].p;
    if (d.norm() > 1e-9) {
      if (k == i) return d.normalized();
      break;
    }
  }
  for (std::size_t k = std::min(i, w.size() - 1); k-- > 0;) {
    const Vec2 d = w[k + 1].p - w[k].p;
    if (d.norm() > 1e-9) return d.normalized();
  }
  for (std::size_t k = i; k + 1 < w.size(); ++k) {
    const Vec2 d = w[k + 1].p - w[k].p;
    if (d.norm() > 1e-9) return d.normalized();
  }
  return Vec2::UnitX();
}

}  // namespace

void SyntheticScenario::validate() const {
  if (!(fps > 0.0)) throw std::invalid_argument("scenario fps must be positive");
  if (noise_px < 0.0) throw std::invalid_argument("noise sigma must be non-negative");
  for (const auto& v : vehicles) {
    if (!(v.length > 0 && v.width > 0 && v.height > 0)) {
      throw std::invalid_argument("vehicle dimensions must be positive");
    }
    if (v.waypoints.empty()) throw std::invalid_argument("vehicle without waypoints");
    for (std::size_t i = 1; i < v.waypoints.size(); ++i) {
      if (!(v.waypoints[i].t > v.waypoints[i - 1].t)) {
        throw std::invalid_argument("waypoint timestamps must strictly increase");
      }
    }
  }
}

std::optional<VehiclePose> pose_at(const VehicleScript& v, double t) {
  const auto& w = v.waypoints;
  if (w.empty() || t < w.front().t - 1e-12 || t > w.back().t + 1e-12) return std::nullopt;
  if (w.size() == 1) return VehiclePose{w[0].p, Vec2::UnitX(), Vec2::Zero()};
  auto it = std::upper_bound(w.begin(), w.end(), t,
                             [](double value, const Waypoint& wp) { return value < wp.t; });
  std::size_t i = it == w.begin() ? 0 : static_cast<std::size_t>(it - w.begin()) - 1;
  i = std::min(i, w.size() - 2);
  const double span = w[i + 1].t - w[i].t;
  const double a = std::clamp((t - w[i].t) / span, 0.0, 1.0);
  VehiclePose pose;
  pose.position = (1.0 - a) * w[i].p + a * w[i + 1].p;
  pose.velocity = (w[i + 1].p - w[i].p) / span;
  pose.heading = segment_heading(w, i);
  return pose;
}

Quadrangle vehicle_footprint(const VehicleScript& v, const VehiclePose& pose) {
  const Vec2 f = pose.heading * (0.5 * v.length);
  const Vec2 l = Vec2(-pose.heading.y(), pose.heading.x()) * (0.5 * v.width);
  const Vec2& c = pose.position;
  return Quadrangle{{c - f - l, c + f - l, c + f + l, c - f + l}};
}

std::optional<BBox> project_vehicle(const CameraModel& camera, const VehicleScript& v, double t,
                                    Polygon* contour) {
  const auto pose = pose_at(v, t);
  if (!pose) return std::nullopt;
  const Quadrangle fp = vehicle_footprint(v, *pose);
  Polygon corners;
  corners.reserve(8);
  const ImageSize size = camera.image_size();
  for (double z : {0.0, v.height}) {
    for (const auto& g : fp.v) {
      double depth = 0.0;
      Vec2 x;
      try {
        x = project_world_to_image(camera, Vec3(g.x(), g.y(), z), depth);
      } catch (const GeometryError&) {
        return std::nullopt;
      }
      if (!(depth > 0.0) || x.x() < 0 || x.y() < 0 || x.x() > size.width || x.y() > size.height) {
        return std::nullopt;
      }
      corners.push_back(x);
    }
  }
  double x0 = corners[0].x(), x1 = x0, y0 = corners[0].y(), y1 = y0;
  for (const auto& c : corners) {
    x0 = std::min(x0, c.x());
    x1 = std::max(x1, c.x());
    y0 = std::min(y0, c.y());
    y1 = std::max(y1, c.y());
  }
  if (contour != nullptr) *contour = hull_of(corners);
  return BBox{x0, y0, x1 - x0, y1 - y0};
}

std::vector<TrackPoint> generate_scenario(const SyntheticScenario& scenario, std::uint64_t seed) {
  scenario.validate();
  std::vector<const VehicleScript*> order;
  for (const auto& v : scenario.vehicles) order.push_back(&v);
  std::stable_sort(order.begin(), order.end(), [](const VehicleScript* a, const VehicleScript* b) {
    return a->track_id < b->track_id;
  });

  std::vector<TrackPoint> out;
  for (const VehicleScript* v : order) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(v->track_id),
                      static_cast<std::uint32_t>(static_cast<std::uint64_t>(v->track_id) >> 32)};
    std::mt19937_64 rng(seq);
    std::normal_distribution<double> noise(0.0, 1.0);
    const auto first = static_cast<std::int64_t>(std::ceil(v->waypoints.front().t * scenario.fps - 1e-9));
    const auto last = static_cast<std::int64_t>(std::floor(v->waypoints.back().t * scenario.fps + 1e-9));
    for (std::int64_t f = std::max<std::int64_t>(0, first); f <= last; ++f) {
      const double t = static_cast<double>(f) / scenario.fps;
      Polygon contour;
      const auto box = project_vehicle(scenario.camera, *v, t, &contour);
      if (!box) continue;
      TrackPoint tp;
      tp.frame_index = f;
      tp.time_s = t;
      tp.track_id = v->track_id;
      tp.class_label = v->class_label;
      tp.confidence = 1.0;
      const double s = scenario.noise_px;
      double left = box->left, top = box->top, right = box->right(), bottom = box->bottom();
      if (s > 0.0) {
        left += s * noise(rng);
        top += s * noise(rng);
        right += s * noise(rng);
        bottom += s * noise(rng);
      }
      if (!(right > left && bottom > top)) continue;
      tp.bbox = {left, top, right - left, bottom - top};
      if (scenario.emit_contours) {
        if (s > 0.0) {
          for (auto& p : contour) p += Vec2(s * noise(rng), s * noise(rng));
          contour = hull_of(contour);
        }
        if (contour.size() >= 3) tp.contour = std::move(contour);
      }
      out.push_back(std::move(tp));
    }
  }
  return out;
}

std::vector<GroundTruthEvent> ground_truth_events(const SyntheticScenario& scenario,
                                                  const std::string& video_id) {
  std::vector<GroundTruthEvent> out;
  for (const auto& e : scenario.expected_events) {
    GroundTruthEvent g;
    g.video_id = video_id;
    g.type = e.type;
    g.t_s = e.t_s;
    g.t_e = e.t_e;
    const VehicleScript* v = nullptr;
    for (const auto& cand : scenario.vehicles) {
      if (cand.track_id == e.track_id) v = &cand;
    }
    if (v != nullptr) {
      const auto first = static_cast<std::int64_t>(std::ceil(e.t_s * scenario.fps - 1e-9));
      const auto last = static_cast<std::int64_t>(std::floor(e.t_e * scenario.fps + 1e-9));
      for (std::int64_t f = first; f <= last; ++f) {
        if (const auto box = project_vehicle(scenario.camera, *v, f / scenario.fps)) {
          g.frames[f] = *box;
        }
      }
    }
    out.push_back(std::move(g));
  }
  return out;
}

ManeuverBuilder::ManeuverBuilder(std::int64_t track_id, const Vec2& start, double heading_deg,
                                 double t0, double speed)
    : p_(start), heading_rad_(heading_deg * kDegToRad), t_(t0), speed_(speed) {
  script_.track_id = track_id;
  script_.waypoints.push_back({t0, start});
}

ManeuverBuilder& ManeuverBuilder::dimensions(double length, double width, double height) {
  script_.length = length;
  script_.width = width;
  script_.height = height;
  return *this;
}

ManeuverBuilder& ManeuverBuilder::vehicle_class(VehicleClass c) {
  script_.class_label = c;
  return *this;
}

void ManeuverBuilder::sample(double t, const Vec2& p) {
  if (t > script_.waypoints.back().t + 1e-12) script_.waypoints.push_back({t, p});
}

ManeuverBuilder& ManeuverBuilder::cruise(double duration_s) {
  const Vec2 dir(std::cos(heading_rad_), std::sin(heading_rad_));
  const int n = std::max(1, static_cast<int>(std::ceil(duration_s / kSampleDt)));
  const Vec2 p0 = p_;
  const double t0 = t_;
  for (int k = 1; k <= n; ++k) {
    const double dt = duration_s * k / n;
    sample(t0 + dt, p0 + dir * speed_ * dt);
  }
  p_ = p0 + dir * speed_ * duration_s;
  t_ = t0 + duration_s;
  return *this;
}

ManeuverBuilder& ManeuverBuilder::turn(double angle_deg, double radius_m) {
  if (!(speed_ > 0.0) || !(radius_m > 0.0)) {
    throw std::invalid_argument("turns need a positive speed and radius");
  }
  const double angle = angle_deg * kDegToRad;
  const double sign = angle >= 0 ? 1.0 : -1.0;
  const double duration = std::abs(angle) * radius_m / speed_;
  // Centre of the arc lies to the left (positive) or right of the heading.
  const Vec2 left(-std::sin(heading_rad_), std::cos(heading_rad_));
  const Vec2 centre = p_ + sign * radius_m * left;
  const double phi0 = std::atan2(p_.y() - centre.y(), p_.x() - centre.x());
  const int n = std::max(2, static_cast<int>(std::ceil(duration / kSampleDt)));
  const double t0 = t_;
  for (int k = 1; k <= n; ++k) {
    const double a = angle * k / n;
    const double phi = phi0 + a;
    sample(t0 + duration * k / n, centre + radius_m * Vec2(std::cos(phi), std::sin(phi)));
  }
  const double phi_end = phi0 + angle;
  p_ = centre + radius_m * Vec2(std::cos(phi_end), std::sin(phi_end));
  heading_rad_ += angle;
  t_ = t0 + duration;

  EventRecord e;
  e.track_id = script_.track_id;
  e.t_s = t0;
  e.t_e = t_;
  e.theta_deg = angle_deg;
  if (std::abs(angle_deg) >= kScriptThetaMax) {
    e.type = EventType::u_turn;
  } else {
    e.type = angle_deg > 0 ? EventType::turn_left : EventType::turn_right;
  }
  e.score = 1.0;
  events_.push_back(e);
  return *this;
}

ManeuverBuilder& ManeuverBuilder::change_speed(double target_mps, double duration_s) {
  const Vec2 dir(std::cos(heading_rad_), std::sin(heading_rad_));
  const double v0 = speed_;
  const double acc = (target_mps - v0) / duration_s;
  const int n = std::max(2, static_cast<int>(std::ceil(duration_s / kSampleDt)));
  const Vec2 p0 = p_;
  const double t0 = t_;
  for (int k = 1; k <= n; ++k) {
    const double dt = duration_s * k / n;
    sample(t0 + dt, p0 + dir * (v0 * dt + 0.5 * acc * dt * dt));
  }
  p_ = p0 + dir * (v0 * duration_s + 0.5 * acc * duration_s * duration_s);
  t_ = t0 + duration_s;
  speed_ = target_mps;

  const bool is_start = v0 <= kScriptStopMax && target_mps >= kScriptMoveMin;
  const bool is_stop = v0 >= kScriptMoveMin && target_mps <= kScriptStopMax;
  if (is_start || is_stop) {
    EventRecord e;
    e.type = is_start ? EventType::start : EventType::stop;
    e.track_id = script_.track_id;
    e.t_s = t0;
    e.t_e = t_;
    e.v_start = v0;
    e.v_end = target_mps;
    e.score = 1.0;
    events_.push_back(e);
  }
  return *this;
}

ManeuverBuilder& ManeuverBuilder::wait(double duration_s) {
  if (speed_ != 0.0) throw std::invalid_argument("wait requires a stopped vehicle");
  const int n = std::max(1, static_cast<int>(std::ceil(duration_s / kSampleDt)));
  for (int k = 1; k <= n; ++k) sample(t_ + duration_s * k / n, p_);
  t_ += duration_s;
  return *this;
}

}  // namespace kinevent
