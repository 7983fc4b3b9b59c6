#include <algorithm>
#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "kinevent/ground_geometry.hpp"
#include "kinevent/pipeline.hpp"
#include "kinevent/synthetic.hpp"
#include "scene.hpp"

using namespace kinevent;
using kinevent::testing::ground_at;
using kinevent::testing::kDeg;
using kinevent::testing::make_camera;

namespace {

// Largest distance from a vertex of `a` to its nearest vertex in `b`, both ways.
double vertex_set_distance(const Quadrangle& a, const Quadrangle& b) {
  double worst = 0.0;
  for (const auto* pair : {&a, &b}) {
    const Quadrangle& x = *pair;
    const Quadrangle& y = pair == &a ? b : a;
    for (const auto& p : x.v) {
      double best = std::numeric_limits<double>::infinity();
      for (const auto& q : y.v) best = std::min(best, (p - q).norm());
      worst = std::max(worst, best);
    }
  }
  return worst;
}

VehicleScript parked(const Vec2& at, double heading_deg, double length = 4.5, double width = 1.8,
                     double height = 1.5) {
  VehicleScript v;
  v.track_id = 1;
  v.length = length;
  v.width = width;
  v.height = height;
  const Vec2 d(std::cos(heading_deg * kDeg), std::sin(heading_deg * kDeg));
  v.waypoints = {{0.0, at}, {1.0, at + 1e-3 * d}};
  return v;
}

double point_quad_gap(const Vec2& p, const Quadrangle& q) {
  // Zero inside, else distance to the boundary.
  bool inside = true;
  double best = std::numeric_limits<double>::infinity();
  for (int i = 0; i < 4; ++i) {
    const Vec2 a = q.v[i], b = q.v[(i + 1) % 4];
    const Vec2 e = b - a;
    if (e.x() * (p - a).y() - e.y() * (p - a).x() < 0) inside = false;
    const double t = std::clamp((p - a).dot(e) / e.squaredNorm(), 0.0, 1.0);
    best = std::min(best, (a + t * e - p).norm());
  }
  return inside ? 0.0 : best;
}

}  // namespace

TEST(GroundVelocity, ZeroImageVelocityIsZero) {
  const auto cam = make_camera();
  EXPECT_EQ(ground_velocity(cam, Vec2(900, 700), Vec2::Zero(), 1.0 / 30), Vec2::Zero());
}

TEST(GroundVelocity, LinearInImageVelocity) {
  const auto cam = make_camera();
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> px(300, 1600), py(600, 1000), pv(-30, 30);
  for (int i = 0; i < 100; ++i) {
    const Vec2 p(px(rng), py(rng));
    const Vec2 v(pv(rng), pv(rng));
    const Vec2 g1 = ground_velocity(cam, p, v, 1.0 / 30);
    const Vec2 g2 = ground_velocity(cam, p, 2.0 * v, 1.0 / 30);
    EXPECT_LT((g2 - 2.0 * g1).norm(), 1e-3 * (2.0 * g1).norm());
  }
}

TEST(GroundVelocity, ScriptedTenMetersPerSecond) {
  const auto cam = make_camera();
  SyntheticScenario s{cam};
  const Vec2 start = ground_at(cam, 0.25, 0.6);
  const Vec2 end = ground_at(cam, 0.75, 0.6);
  const double heading = std::atan2((end - start).y(), (end - start).x()) / kDeg;
  ManeuverBuilder b(1, start, heading, 0.0, 10.0);
  b.cruise((end - start).norm() / 10.0);
  s.vehicles.push_back(b.script());
  const auto tracks = generate_scenario(s, 0);
  ASSERT_GT(tracks.size(), 40u);

  PipelineConfig config;
  const auto segs = split_tracks(tracks, config.max_track_gap_frames);
  ASSERT_EQ(segs.size(), 1u);
  const auto res = process_segment(config, cam, segs[0]);
  // Skip the filter's convergence at the start.
  std::vector<double> speeds;
  for (std::size_t i = 30; i < res.observations.size(); ++i) {
    speeds.push_back(res.observations[i].ground_velocity.norm());
  }
  std::sort(speeds.begin(), speeds.end());
  EXPECT_NEAR(speeds[speeds.size() / 2], 10.0, 0.2);
  // The lowest cuboid corner in the image changes once along the path, which shifts the
  // box bottom-middle and briefly adds a few percent.
  for (double sp : speeds) EXPECT_NEAR(sp, 10.0, 0.5);
}

TEST(Box3D, ExactCuboidContourRecoversFootprint) {
  const auto cam = make_camera();
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> fx(0.2, 0.8), fy(0.45, 0.85), hd(-180, 180);
  int checked = 0;
  for (int i = 0; i < 200; ++i) {
    const auto v = parked(ground_at(cam, fx(rng), fy(rng)), hd(rng));
    Polygon contour;
    if (!project_vehicle(cam, v, 0.5, &contour)) continue;
    const auto pose = *pose_at(v, 0.5);
    const Quadrangle truth = vehicle_footprint(v, pose);
    const Box3D box = build_3d_bbox(cam, contour, pose.heading);
    ASSERT_FALSE(box.fallback) << i;
    EXPECT_LT(vertex_set_distance(box.footprint, truth), 0.1) << i;
    EXPECT_LT(std::abs(box.footprint.signed_area() - truth.signed_area()) / truth.signed_area(),
              0.05);
    EXPECT_NEAR(box.height_m, v.height, 0.1);
    EXPECT_GT(box.footprint.signed_area(), 0.0);
    EXPECT_TRUE(box.footprint.is_convex());
    ++checked;
  }
  EXPECT_GT(checked, 150);
}

TEST(Box3D, ReversedMotionDirectionGivesSameFootprint) {
  const auto cam = make_camera(-20.0, 50.0, 1300.0, 15.0);
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> fx(0.2, 0.8), fy(0.45, 0.85), hd(-180, 180), size(0.7, 1.4);
  std::normal_distribution<double> jitter(0.0, 1.0);
  int checked = 0;
  for (int i = 0; i < 200; ++i) {
    const auto v = parked(ground_at(cam, fx(rng), fy(rng)), hd(rng), 4.5 * size(rng),
                          1.8 * size(rng), 1.5 * size(rng));
    Polygon contour;
    if (!project_vehicle(cam, v, 0.5, &contour)) continue;
    for (auto& p : contour) p += Vec2(jitter(rng), jitter(rng));
    const Vec2 d = pose_at(v, 0.5)->heading;
    const Box3D a = build_3d_bbox(cam, contour, d);
    const Box3D b = build_3d_bbox(cam, contour, -d);
    EXPECT_EQ(a.fallback, b.fallback);
    EXPECT_LT(vertex_set_distance(a.footprint, b.footprint), 1e-6) << i;
    ++checked;
  }
  EXPECT_GT(checked, 150);
}

TEST(Box3D, DegenerateContourThrows) {
  const auto cam = make_camera();
  const Polygon line{{100, 700}, {200, 700}, {300, 700}};
  try {
    build_3d_bbox(cam, line, Vec2(1, 0));
    FAIL();
  } catch (const GeometryError& e) {
    EXPECT_EQ(e.code(), GeometryErrc::degenerate);
  }
  EXPECT_THROW(build_3d_bbox(cam, Polygon{{1, 1}, {2, 2}}, Vec2(1, 0)), GeometryError);
}

TEST(Box3D, VanishingPointInsideContourFallsBack) {
  // A contour that surrounds the motion vanishing point admits no tangent pair.
  const auto cam = make_camera();
  const Vec2 d(1, 0);
  const Vec2 vp = vanishing_point_of_ground_direction(cam, d).point();
  // Keep the contour's centroid below the horizon so it can still be placed.
  const Polygon contour{{vp.x() - 400, vp.y() - 50},
                        {vp.x() + 400, vp.y() - 50},
                        {vp.x() + 400, vp.y() + 900},
                        {vp.x() - 400, vp.y() + 900}};
  const Box3D box = build_3d_bbox(cam, contour, d);
  EXPECT_TRUE(box.fallback);
}

TEST(BBoxFootprint, BottomEdgeSweptByWidth) {
  const auto cam = make_camera();
  const BBox box{800, 600, 120, 90};
  const Quadrangle q = footprint_from_bbox(cam, box, 1.8);
  const Vec2 a = reproject_image_to_ground(cam, {box.left, box.bottom()});
  const Vec2 b = reproject_image_to_ground(cam, {box.right(), box.bottom()});
  // Two of the vertices are the bottom-edge ground points.
  int found = 0;
  for (const auto& v : q.v) {
    if ((v - a).norm() < 1e-9 || (v - b).norm() < 1e-9) ++found;
  }
  EXPECT_EQ(found, 2);
  EXPECT_NEAR(q.signed_area(), (b - a).norm() * 1.8, 1e-9);
  EXPECT_TRUE(q.is_convex());
  // The sweep goes away from the camera.
  const Vec2 cam_ground = cam.center().head<2>() * cam.scale();
  EXPECT_GT((q.centroid() - cam_ground).norm(), (0.5 * (a + b) - cam_ground).norm());
}

TEST(Quadrangles, NormalizeCcwReversesClockwise) {
  const Quadrangle cw{{Vec2(0, 0), Vec2(0, 1), Vec2(1, 1), Vec2(1, 0)}};
  EXPECT_LT(cw.signed_area(), 0.0);
  const Quadrangle ccw = normalize_ccw(cw);
  EXPECT_NEAR(ccw.signed_area(), 1.0, 1e-15);
  EXPECT_EQ(ccw.v[0], cw.v[0]);
  EXPECT_EQ(normalize_ccw(ccw).v, ccw.v);
  EXPECT_LT((ccw.centroid() - Vec2(0.5, 0.5)).norm(), 1e-15);
  const Quadrangle dart{{Vec2(0, 0), Vec2(2, 0), Vec2(0.5, 0.5), Vec2(0, 2)}};
  EXPECT_FALSE(dart.is_convex());
}

TEST(Observation, MovingVehicleHasValidOrientation) {
  const auto cam = make_camera();
  OrientationState orient;
  SmoothedTrackPoint s;
  s.bottom_middle = Vec2(900, 800);
  s.box_size = Vec2(150, 100);
  s.image_velocity = Vec2(60, 0);
  const auto o = make_observation(cam, s, nullptr, orient, 30.0, {});
  EXPECT_TRUE(o.orientation_valid);
  EXPECT_TRUE(orient.ever_valid);
  EXPECT_LT((o.orientation - o.ground_velocity.normalized()).norm(), 1e-12);
}

TEST(Observation, StoppedVehicleKeepsPreviousOrientation) {
  const auto cam = make_camera();
  const auto v = parked(ground_at(cam, 0.5, 0.65), 35.0);
  Polygon contour;
  const auto box = project_vehicle(cam, v, 0.5, &contour);
  ASSERT_TRUE(box);
  OrientationState orient;
  orient.direction = Vec2(std::cos(35 * kDeg), std::sin(35 * kDeg));
  orient.ever_valid = true;
  SmoothedTrackPoint s;
  s.bottom_middle = box->bottom_middle();
  s.box_size = Vec2(box->width, box->height);
  s.image_velocity = Vec2(0.5, 0.2);  // a few cm/s on the ground
  const auto o = make_observation(cam, s, &contour, orient, 30.0, {});
  EXPECT_FALSE(o.orientation_valid);
  EXPECT_LT((o.orientation - orient.direction).norm(), 1e-15);
  EXPECT_FALSE(o.footprint_fallback);
  EXPECT_LT(vertex_set_distance(o.footprint, vehicle_footprint(v, *pose_at(v, 0.5))), 0.1);
}

TEST(Observation, StoppedVehicleAtStartUsesFlaggedFallback) {
  const auto cam = make_camera();
  const auto v = parked(ground_at(cam, 0.5, 0.65), 35.0);
  Polygon contour;
  const auto box = project_vehicle(cam, v, 0.5, &contour);
  ASSERT_TRUE(box);
  OrientationState orient;
  SmoothedTrackPoint s;
  s.bottom_middle = box->bottom_middle();
  s.box_size = Vec2(box->width, box->height);
  const auto o = make_observation(cam, s, &contour, orient, 30.0, {});
  EXPECT_FALSE(o.orientation_valid);
  EXPECT_TRUE(o.footprint_fallback);
  EXPECT_FALSE(orient.ever_valid);
  EXPECT_NEAR(o.footprint.signed_area(),
              footprint_from_bbox(cam, *box, 1.8).signed_area(), 1e-6);
}

TEST(Observation, FootprintsConvexAndPositionInside) {
  // Whole-pipeline observations of a turning vehicle with contour noise.
  const auto cam = make_camera();
  SyntheticScenario s{cam};
  s.noise_px = 1.0;
  ManeuverBuilder b(1, ground_at(cam, 0.3, 0.7), 10.0, 0.0, 5.0);
  b.cruise(1.0).turn(90, 12).cruise(1.0);
  s.vehicles.push_back(b.script());
  const auto tracks = generate_scenario(s, 1);
  PipelineConfig config;
  for (const auto& seg : split_tracks(tracks, config.max_track_gap_frames)) {
    const auto res = process_segment(config, cam, seg);
    ASSERT_FALSE(res.observations.empty());
    for (const auto& o : res.observations) {
      EXPECT_TRUE(o.footprint.is_convex());
      EXPECT_GT(o.footprint.signed_area(), 0.0);
      EXPECT_LE(point_quad_gap(o.position, o.footprint), 0.5);
    }
  }
}

TEST(Observation, NoiseFreeFootprintAreaWithinFivePercent) {
  // Straight driving in twelve directions; the heading comes from the filtered velocity.
  const auto cam = make_camera();
  const Vec2 centre = ground_at(cam, 0.5, 0.62);
  PipelineConfig config;
  int contour_frames = 0;
  double worst = 0.0;
  for (int k = 0; k < 12; ++k) {
    const double heading = 30.0 * k + 7.0;
    const Vec2 d(std::cos(heading * kDeg), std::sin(heading * kDeg));
    SyntheticScenario s{cam};
    ManeuverBuilder b(1, centre - 8.0 * d, heading, 0.0, 6.0);
    b.cruise(16.0 / 6.0);
    const auto script = b.script();
    s.vehicles.push_back(script);
    const auto tracks = generate_scenario(s, 0);
    const auto segs = split_tracks(tracks, config.max_track_gap_frames);
    ASSERT_EQ(segs.size(), 1u);
    const auto res = process_segment(config, cam, segs[0]);
    const double truth = script.length * script.width;
    for (std::size_t i = 30; i < res.observations.size(); ++i) {
      const auto& o = res.observations[i];
      if (o.footprint_fallback) continue;
      ++contour_frames;
      worst = std::max(worst, std::abs(o.footprint.signed_area() - truth) / truth);
    }
  }
  EXPECT_GT(contour_frames, 300);
  EXPECT_LT(worst, 0.05);
}

TEST(Observation, TurnLagInflatesFootprintError) {
  // While turning, the filtered velocity trails the true heading by a few degrees, so
  // the box is built around a slightly wrong axis. The footprint stays convex and sized
  // within about a third of the truth.
  const auto cam = make_camera();
  SyntheticScenario s{cam};
  ManeuverBuilder b(1, ground_at(cam, 0.3, 0.6), -15.0, 0.0, 6.0);
  b.cruise(1.5).turn(60, 15).cruise(1.0);
  const auto script = b.script();
  s.vehicles.push_back(script);
  PipelineConfig config;
  const auto segs = split_tracks(generate_scenario(s, 0), config.max_track_gap_frames);
  ASSERT_EQ(segs.size(), 1u);
  const auto res = process_segment(config, cam, segs[0]);
  const double truth = script.length * script.width;
  for (std::size_t i = 30; i < res.observations.size(); ++i) {
    const auto& o = res.observations[i];
    EXPECT_TRUE(o.footprint.is_convex());
    EXPECT_LT(std::abs(o.footprint.signed_area() - truth) / truth, 0.35);
  }
}
