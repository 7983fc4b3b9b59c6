#include "kinevent/ground_geometry.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>

namespace kinevent {

namespace {

double cross2(const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); }

double polygon_signed_area(const Polygon& poly) {
  double a = 0.0;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    a += cross2(poly[i], poly[(i + 1) % poly.size()]);
  }
  return 0.5 * a;
}

// Andrew's monotone chain; counterclockwise in a y-up frame.
Polygon convex_hull(Polygon pts) {
  std::sort(pts.begin(), pts.end(), [](const Vec2& a, const Vec2& b) {
    return a.x() < b.x() || (a.x() == b.x() && a.y() < b.y());
  });
  if (pts.size() < 3) return pts;
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

// Distance from p to the hull, negative when p is inside.
double signed_hull_distance(const Polygon& hull, const Vec2& p) {
  bool inside = true;
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < hull.size(); ++i) {
    const Vec2& a = hull[i];
    const Vec2& b = hull[(i + 1) % hull.size()];
    const Vec2 ab = b - a;
    if (cross2(ab, p - a) < 0) inside = false;
    const double t = std::clamp((p - a).dot(ab) / ab.squaredNorm(), 0.0, 1.0);
    best = std::min(best, (a + t * ab - p).norm());
  }
  return inside ? -best : best;
}

BBox polygon_bbox(const Polygon& poly) {
  double x0 = poly[0].x(), x1 = x0, y0 = poly[0].y(), y1 = y0;
  for (const auto& p : poly) {
    x0 = std::min(x0, p.x());
    x1 = std::max(x1, p.x());
    y0 = std::min(y0, p.y());
    y1 = std::max(y1, p.y());
  }
  return {x0, y0, x1 - x0, y1 - y0};
}

struct TangentPair {
  Vec3 first;
  Vec3 second;
};

// The two lines through the vanishing point touching the contour, oriented so the
// contour lies on their non-negative side.
std::optional<TangentPair> tangent_lines(const HomogeneousPoint& vp, const Polygon& contour,
                                         const Polygon& hull, const Vec2& centroid) {
  std::size_t lo = 0, hi = 0;
  if (vp.at_infinity()) {
    const Vec2 dir = vp.direction();
    const Vec2 n(-dir.y(), dir.x());
    double vlo = n.dot(contour[0]), vhi = vlo;
    for (std::size_t i = 1; i < contour.size(); ++i) {
      const double val = n.dot(contour[i]);
      if (val < vlo) { vlo = val; lo = i; }
      if (val > vhi) { vhi = val; hi = i; }
    }
  } else {
    const Vec2 q = vp.point();
    if (signed_hull_distance(hull, q) < 1.0) return std::nullopt;
    const Vec2 ref = centroid - q;
    auto angle = [&](const Vec2& x) {
      const Vec2 r = x - q;
      return std::atan2(cross2(ref, r), ref.dot(r));
    };
    double alo = angle(contour[0]), ahi = alo;
    for (std::size_t i = 1; i < contour.size(); ++i) {
      const double a = angle(contour[i]);
      if (a < alo) { alo = a; lo = i; }
      if (a > ahi) { ahi = a; hi = i; }
    }
  }
  if (lo == hi) return std::nullopt;
  const Vec3 c(centroid.x(), centroid.y(), 1.0);
  auto line_through = [&](std::size_t k) -> std::optional<Vec3> {
    Vec3 l = vp.h.cross(Vec3(contour[k].x(), contour[k].y(), 1.0));
    const double n = l.head<2>().norm();
    if (!(n > 0.0)) return std::nullopt;
    l /= n;
    if (l.dot(c) < 0) l = -l;
    return l;
  };
  const auto l1 = line_through(lo);
  const auto l2 = line_through(hi);
  if (!l1 || !l2) return std::nullopt;
  return TangentPair{*l1, *l2};
}

}  // namespace

double Quadrangle::signed_area() const {
  double a = 0.0;
  for (int i = 0; i < 4; ++i) a += cross2(v[i], v[(i + 1) % 4]);
  return 0.5 * a;
}

Vec2 Quadrangle::centroid() const {
  const double a = signed_area();
  if (std::abs(a) < 1e-15) return 0.25 * (v[0] + v[1] + v[2] + v[3]);
  Vec2 c = Vec2::Zero();
  for (int i = 0; i < 4; ++i) {
    const Vec2& p = v[i];
    const Vec2& q = v[(i + 1) % 4];
    c += (p + q) * cross2(p, q);
  }
  return c / (6.0 * a);
}

bool Quadrangle::is_convex(double tol) const {
  int pos = 0, neg = 0;
  for (int i = 0; i < 4; ++i) {
    const double c = cross2(v[(i + 1) % 4] - v[i], v[(i + 2) % 4] - v[(i + 1) % 4]);
    if (c > tol) ++pos;
    else if (c < -tol) ++neg;
  }
  return pos == 4 || neg == 4;
}

Quadrangle Quadrangle::translated(const Vec2& offset) const {
  Quadrangle q = *this;
  for (auto& p : q.v) p += offset;
  return q;
}

Quadrangle normalize_ccw(const Quadrangle& q) {
  if (q.signed_area() >= 0) return q;
  return Quadrangle{{q.v[0], q.v[3], q.v[2], q.v[1]}};
}

Vec2 ground_velocity(const CameraModel& camera, const Vec2& p, const Vec2& v_img, double dt) {
  if (v_img.x() == 0.0 && v_img.y() == 0.0) return Vec2::Zero();
  const Vec2 g0 = reproject_image_to_ground(camera, p);
  const Vec2 g1 = reproject_image_to_ground(camera, p + v_img * dt);
  return (g1 - g0) / dt;
}

Quadrangle footprint_from_bbox(const CameraModel& camera, const BBox& box, double width_m) {
  const Vec2 a = reproject_image_to_ground(camera, {box.left, box.bottom()});
  const Vec2 b = reproject_image_to_ground(camera, {box.right(), box.bottom()});
  Vec2 e = b - a;
  const double len = e.norm();
  if (!(len > 0.0)) {
    throw GeometryError(GeometryErrc::degenerate, "bounding box bottom edge has zero length");
  }
  e /= len;
  Vec2 n(-e.y(), e.x());
  const Vec2 cam_ground = camera.center().head<2>() * camera.scale();
  if (n.dot(0.5 * (a + b) - cam_ground) < 0) n = -n;
  return normalize_ccw(Quadrangle{{a, b, b + width_m * n, a + width_m * n}});
}

Box3D build_3d_bbox(const CameraModel& camera, const Polygon& contour, const Vec2& motion_dir,
                    const GeometryParams& params) {
  if (contour.size() < 3 || std::abs(polygon_signed_area(contour)) < 1e-9) {
    throw GeometryError(GeometryErrc::degenerate, "contour has zero area");
  }
  const Vec2 d = motion_dir.normalized();
  const Polygon hull = convex_hull(contour);
  Vec2 centroid = Vec2::Zero();
  for (const auto& p : contour) centroid += p;
  centroid /= static_cast<double>(contour.size());

  auto fallback = [&]() {
    Box3D box;
    box.fallback = true;
    box.footprint = footprint_from_bbox(camera, polygon_bbox(contour), params.default_vehicle_width);
    for (int i = 0; i < 4; ++i) {
      box.image_corners[i] = project_world_to_image(camera, Vec3(box.footprint.v[i].x(),
                                                                 box.footprint.v[i].y(), 0.0));
      box.image_corners[i + 4] = box.image_corners[i];
    }
    return box;
  };

  // Box axes in world coordinates: along motion, left of motion, up.
  const Vec3 e_u(d.x(), d.y(), 0.0);
  const Vec3 e_v(-d.y(), d.x(), 0.0);
  const Vec3 e_z = Vec3::UnitZ();
  const HomogeneousPoint vps[3] = {vanishing_point_of_ground_direction(camera, d),
                                   vanishing_point_of_ground_direction(camera, e_v.head<2>()),
                                   camera.w()};

  // Each tangent line back-projects to a plane through the camera centre that touches the
  // box. With the box written as O + s*e_u + r*e_v + z*e_z, s in [s0,s1], r in [r0,r1],
  // z in [0,h], the plane's minimum over the box is zero, which is linear in
  // (s0, s1, r0, r1, h) once the signs of the plane normal are known.
  Vec2 origin_m;
  try {
    origin_m = reproject_image_to_ground(camera, centroid);
  } catch (const GeometryError&) {
    return fallback();
  }
  const Vec4 O(origin_m.x() / camera.scale(), origin_m.y() / camera.scale(), 0.0, 1.0);

  Eigen::Matrix<double, 6, 5> A = Eigen::Matrix<double, 6, 5>::Zero();
  Eigen::Matrix<double, 6, 1> rhs;
  int row = 0;
  for (const auto& vp : vps) {
    const auto tangents = tangent_lines(vp, contour, hull, centroid);
    if (!tangents) return fallback();
    for (const Vec3& l : {tangents->first, tangents->second}) {
      const Vec4 plane = camera.P().transpose() * l;
      const double nn = plane.head<3>().norm();
      if (!(nn > 0.0)) return fallback();
      const Vec3 n = plane.head<3>() / nn;
      const double cs = n.dot(e_u);
      const double cr = n.dot(e_v);
      const double cz = n.dot(e_z);
      A(row, 0) = cs > 0 ? cs : 0.0;
      A(row, 1) = cs < 0 ? cs : 0.0;
      A(row, 2) = cr > 0 ? cr : 0.0;
      A(row, 3) = cr < 0 ? cr : 0.0;
      A(row, 4) = cz < 0 ? cz : 0.0;
      rhs(row) = -plane.dot(O) / nn;
      ++row;
    }
  }

  Eigen::JacobiSVD<Eigen::Matrix<double, 6, 5>> svd(A, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  if (!(sv(4) > 1e-6 * sv(0))) return fallback();
  const Eigen::Matrix<double, 5, 1> x = svd.solve(rhs);
  const double s0 = x(0), s1 = x(1), r0 = x(2), r1 = x(3), h = x(4);
  const double min_extent = 0.1 / camera.scale();
  const double max_extent = 50.0 / camera.scale();
  if (!(s1 - s0 > min_extent && r1 - r0 > min_extent && h > min_extent &&
        s1 - s0 < max_extent && r1 - r0 < max_extent && h < max_extent)) {
    return fallback();
  }

  Box3D box;
  const double ss[4] = {s0, s1, s1, s0};
  const double rr[4] = {r0, r0, r1, r1};
  for (int i = 0; i < 4; ++i) {
    const Vec3 bottom = O.head<3>() + ss[i] * e_u + rr[i] * e_v;
    const Vec3 top = bottom + h * e_z;
    box.footprint.v[i] = bottom.head<2>() * camera.scale();
    try {
      box.image_corners[i] = project_world_to_image(camera, bottom * camera.scale());
      box.image_corners[i + 4] = project_world_to_image(camera, top * camera.scale());
    } catch (const GeometryError&) {
      return fallback();
    }
  }
  box.footprint = normalize_ccw(box.footprint);
  box.height_m = h * camera.scale();
  return box;
}

GroundObservation make_observation(const CameraModel& camera, const SmoothedTrackPoint& s,
                                   const Polygon* contour, OrientationState& orientation,
                                   double fps, const GeometryParams& params) {
  GroundObservation obs;
  obs.frame_index = s.frame_index;
  obs.time_s = s.time_s;
  obs.ground_velocity = ground_velocity(camera, s.bottom_middle, s.image_velocity, 1.0 / fps);

  const double speed = obs.ground_velocity.norm();
  if (speed >= params.v_orient_min) {
    orientation.direction = obs.ground_velocity / speed;
    orientation.ever_valid = true;
    obs.orientation_valid = true;
  }
  obs.orientation = orientation.direction;

  if (contour != nullptr && orientation.ever_valid) {
    const Box3D box = build_3d_bbox(camera, *contour, orientation.direction, params);
    obs.footprint = box.footprint;
    obs.footprint_fallback = box.fallback;
  } else {
    const BBox b{s.bottom_middle.x() - 0.5 * s.box_size.x(), s.bottom_middle.y() - s.box_size.y(),
                 s.box_size.x(), s.box_size.y()};
    obs.footprint = footprint_from_bbox(camera, b, params.default_vehicle_width);
    obs.footprint_fallback = true;
  }
  obs.position = obs.footprint.centroid();
  return obs;
}

}  // namespace kinevent
