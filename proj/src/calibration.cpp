#include "kinevent/calibration.hpp"

#include <cmath>
#include <string>

#include <Eigen/Dense>

namespace kinevent {

namespace {

constexpr double kInvariantTol = 1e-9;

HomogeneousPoint make_homogeneous(const Vec3& h) {
  HomogeneousPoint p;
  p.h = h;
  return p;
}

// Nearest rotation in the Frobenius sense.
Mat3 nearest_rotation(const Mat3& R) {
  Eigen::JacobiSVD<Mat3> svd(R, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Mat3 out = svd.matrixU() * svd.matrixV().transpose();
  if (out.determinant() < 0) {
    Mat3 U = svd.matrixU();
    U.col(2) *= -1.0;
    out = U * svd.matrixV().transpose();
  }
  return out;
}

CameraModel vp_camera_at_height(const Vec2& u, const Vec2& v, ImageSize size, double height) {
  if (size.width <= 0 || size.height <= 0) {
    throw GeometryError(GeometryErrc::precondition, "image size must be positive");
  }
  if ((u - v).norm() < 1e-9) {
    throw GeometryError(GeometryErrc::precondition, "vanishing points u and v must be distinct");
  }
  const Vec2 p(0.5 * size.width, 0.5 * size.height);
  const double f2 = -(u - p).dot(v - p);
  if (!(f2 > 0.0)) {
    throw GeometryError(GeometryErrc::precondition,
                        "vanishing points incompatible with centered principal point");
  }
  const double f = std::sqrt(f2);

  Mat3 K = Mat3::Identity();
  K(0, 0) = f;
  K(1, 1) = f;
  K(0, 2) = p.x();
  K(1, 2) = p.y();

  // Camera-frame directions of the world axes.
  const Vec3 X = Vec3(u.x() - p.x(), u.y() - p.y(), f).normalized();
  Vec3 Y = Vec3(v.x() - p.x(), v.y() - p.y(), f).normalized();
  Vec3 Z = X.cross(Y);
  // Z must point up, i.e. against the optical axis for a camera looking down.
  const bool z_forward = std::abs(Z.z()) > 1e-15 ? Z.z() > 0.0 : Z.y() > 0.0;
  if (z_forward) {
    Y = -Y;
    Z = -Z;
  }

  Mat3 R;
  R.col(0) = X;
  R.col(1) = Y;
  R.col(2) = Z;
  const Vec3 C(0.0, 0.0, height);
  const Vec3 t = -R * C;
  return CameraModel::from_krt(K, R, t, size, 1.0);
}

}  // namespace

bool HomogeneousPoint::at_infinity() const {
  const double n = h.norm();
  if (n == 0.0) return true;
  return std::abs(h.z()) / n < kInfinityTolerance;
}

Vec2 HomogeneousPoint::point() const {
  if (at_infinity()) {
    throw GeometryError(GeometryErrc::at_infinity, "vanishing point lies at infinity");
  }
  return h.head<2>() / h.z();
}

Vec2 HomogeneousPoint::direction() const {
  const Vec2 d = h.head<2>();
  const double n = d.norm();
  return n > 0.0 ? Vec2(d / n) : Vec2(1.0, 0.0);
}

CameraModel::CameraModel(const Mat3& K, const Mat3& R, const Vec3& t, ImageSize size,
                         double scale)
    : K_(K), R_(R), t_(t), size_(size), scale_(scale) {
  if (!(scale > 0.0) || !std::isfinite(scale)) {
    throw GeometryError(GeometryErrc::invalid_model, "camera scale must be positive");
  }
  if (std::abs(K_(1, 0)) > kInvariantTol || std::abs(K_(2, 0)) > kInvariantTol ||
      std::abs(K_(2, 1)) > kInvariantTol || !(K_(0, 0) > 0) || !(K_(1, 1) > 0) ||
      !(K_(2, 2) > 0)) {
    throw GeometryError(GeometryErrc::invalid_model,
                        "K must be upper-triangular with a positive diagonal");
  }
  if ((R_.transpose() * R_ - Mat3::Identity()).norm() > kInvariantTol ||
      std::abs(R_.determinant() - 1.0) > kInvariantTol) {
    throw GeometryError(GeometryErrc::invalid_model, "R must be a proper rotation");
  }
  P_.leftCols<3>() = K_ * R_;
  P_.col(3) = K_ * t_;
  M_inv_ = R_.transpose() * K_.inverse();
  center_ = -R_.transpose() * t_;
  if (!(center_.z() > kInvariantTol * std::max(1.0, center_.norm()))) {
    throw GeometryError(GeometryErrc::invalid_model,
                        "camera centre must lie above the ground plane (world Z up)");
  }
  u_ = make_homogeneous(P_.col(0));
  v_ = make_homogeneous(P_.col(1));
  w_ = make_homogeneous(P_.col(2));
}

CameraModel CameraModel::from_krt(const Mat3& K, const Mat3& R, const Vec3& t, ImageSize size,
                                  double scale) {
  Mat3 R_fixed = R;
  const double ortho_err = (R.transpose() * R - Mat3::Identity()).norm();
  if (ortho_err > kInvariantTol) {
    // Tolerate rounding in externally supplied rotations; reject anything else.
    if (ortho_err > 1e-3 || R.determinant() < 0) {
      throw GeometryError(GeometryErrc::invalid_model, "R must be a proper rotation");
    }
    R_fixed = nearest_rotation(R);
  }
  if (!(K(2, 2) > 0)) {
    throw GeometryError(GeometryErrc::invalid_model, "K(2,2) must be positive");
  }
  return CameraModel(K / K(2, 2), R_fixed, t, size, scale);
}

CameraModel CameraModel::from_projection(const Mat34& P, ImageSize size, double scale) {
  const Mat3 M = P.leftCols<3>();
  if (std::abs(M.determinant()) < 1e-300 || !M.allFinite()) {
    throw GeometryError(GeometryErrc::invalid_model, "left 3x3 block of P is singular");
  }
  // RQ decomposition through QR of the row-reversed transpose.
  Mat3 J = Mat3::Zero();
  J(0, 2) = J(1, 1) = J(2, 0) = 1.0;
  const Mat3 A = (J * M).transpose();
  Eigen::HouseholderQR<Mat3> qr(A);
  const Mat3 Q0 = qr.householderQ();
  const Mat3 R0 = qr.matrixQR().triangularView<Eigen::Upper>();
  Mat3 K = J * R0.transpose() * J;
  Mat3 R = J * Q0.transpose();
  for (int i = 0; i < 3; ++i) {
    if (K(i, i) < 0) {
      K.col(i) *= -1.0;
      R.row(i) *= -1.0;
    }
  }
  Mat34 Pn = P;
  if (R.determinant() < 0) {
    R = -R;
    Pn = -Pn;
  }
  const Vec3 t = K.inverse() * Pn.col(3);
  return from_krt(K, R, t, size, scale);
}

CameraModel CameraModel::with_scale(double meters_per_unit) const {
  return CameraModel(K_, R_, t_, size_, meters_per_unit);
}

HomogeneousPoint estimate_vanishing_point(std::span<const LineSegment> segments) {
  if (segments.size() < 2) {
    throw GeometryError(GeometryErrc::precondition, "at least two segments are required");
  }
  std::vector<Vec2> normals;
  std::vector<double> offsets;
  normals.reserve(segments.size());
  offsets.reserve(segments.size());
  Eigen::Matrix2d A = Eigen::Matrix2d::Zero();
  Vec2 rhs = Vec2::Zero();
  for (const auto& s : segments) {
    const Vec2 d = s.b - s.a;
    const double len = d.norm();
    if (!(len > 0.0)) {
      throw GeometryError(GeometryErrc::degenerate, "segment endpoints must be distinct");
    }
    const Vec2 n(-d.y() / len, d.x() / len);
    const double c = -n.dot(s.a);
    normals.push_back(n);
    offsets.push_back(c);
    A += n * n.transpose();
    rhs -= c * n;
  }

  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> eig(A);
  const double lmin = eig.eigenvalues()(0);
  const double lmax = eig.eigenvalues()(1);
  if (lmin > 1e-12 * lmax) {
    const Vec2 x = A.ldlt().solve(rhs);
    return make_homogeneous(Vec3(x.x(), x.y(), 1.0));
  }

  // All supporting lines share one direction.
  const Vec2 n0 = normals.front();
  double cmin = offsets.front();
  double cmax = offsets.front();
  double cscale = 1.0;
  for (std::size_t i = 0; i < normals.size(); ++i) {
    const double c = normals[i].dot(n0) < 0 ? -offsets[i] : offsets[i];
    cmin = std::min(cmin, c);
    cmax = std::max(cmax, c);
    cscale = std::max(cscale, std::abs(c));
  }
  if (cmax - cmin <= 1e-9 * cscale) {
    throw GeometryError(GeometryErrc::degenerate, "all segments are collinear");
  }
  Vec2 dir(n0.y(), -n0.x());
  if (dir.x() < 0 || (dir.x() == 0 && dir.y() < 0)) dir = -dir;
  return make_homogeneous(Vec3(dir.x(), dir.y(), 0.0));
}

CameraModel camera_from_vanishing_points(const Vec2& u, const Vec2& v, ImageSize size,
                                         const ScaleReference& scale_ref) {
  if (const auto* h = std::get_if<CameraHeightRef>(&scale_ref)) {
    if (!(h->meters > 0.0)) {
      throw GeometryError(GeometryErrc::precondition, "camera height must be positive");
    }
    return vp_camera_at_height(u, v, size, h->meters);
  }
  const auto& seg = std::get<GroundSegmentRef>(scale_ref);
  if (!(seg.meters > 0.0)) {
    throw GeometryError(GeometryErrc::precondition, "scale segment length must be positive");
  }
  const CameraModel unit = vp_camera_at_height(u, v, size, 1.0);
  const double d =
      (reproject_image_to_ground(unit, seg.a) - reproject_image_to_ground(unit, seg.b)).norm();
  if (!(d > 0.0)) {
    throw GeometryError(GeometryErrc::degenerate, "scale segment has zero ground length");
  }
  return vp_camera_at_height(u, v, size, seg.meters / d);
}

CameraModel apply_scale_reference(const CameraModel& camera, const ScaleReference& scale_ref) {
  if (const auto* h = std::get_if<CameraHeightRef>(&scale_ref)) {
    if (!(h->meters > 0.0)) {
      throw GeometryError(GeometryErrc::precondition, "camera height must be positive");
    }
    return camera.with_scale(h->meters / camera.center().z());
  }
  const auto& seg = std::get<GroundSegmentRef>(scale_ref);
  const double d =
      (reproject_image_to_ground(camera, seg.a) - reproject_image_to_ground(camera, seg.b)).norm();
  if (!(d > 0.0) || !(seg.meters > 0.0)) {
    throw GeometryError(GeometryErrc::degenerate, "scale segment has zero length");
  }
  return camera.with_scale(camera.scale() * seg.meters / d);
}

Vec2 project_point(const Mat34& P, const Vec3& X, double* depth) {
  const Vec3 x = P * X.homogeneous();
  const double n = x.norm();
  if (n == 0.0 || std::abs(x.z()) <= HomogeneousPoint::kInfinityTolerance * n) {
    throw GeometryError(GeometryErrc::at_infinity, "point projects to infinity");
  }
  if (depth != nullptr) *depth = x.z();
  return x.head<2>() / x.z();
}

Vec2 project_world_to_image(const CameraModel& camera, const Vec3& X, double& depth) {
  return project_point(camera.P(), X / camera.scale(), &depth);
}

Vec2 project_world_to_image(const CameraModel& camera, const Vec3& X) {
  double depth = 0.0;
  return project_world_to_image(camera, X, depth);
}

Vec2 reproject_image_to_ground(const CameraModel& camera, const Vec2& x) {
  const Vec3 d = camera.M_inv_ * Vec3(x.x(), x.y(), 1.0);
  if (std::abs(d.z()) <= HomogeneousPoint::kInfinityTolerance * d.norm()) {
    throw GeometryError(GeometryErrc::horizon, "image point lies on the horizon");
  }
  const Vec3& C = camera.center();
  const double lambda = -C.z() / d.z();
  if (!(lambda > 0.0)) {
    throw GeometryError(GeometryErrc::behind_camera,
                        "ground intersection lies behind the camera");
  }
  const Vec3 X = C + lambda * d;
  return Vec2(X.x(), X.y()) * camera.scale();
}

HomogeneousPoint vanishing_point_of_ground_direction(const CameraModel& camera, const Vec2& d) {
  if (std::abs(d.norm() - 1.0) > 1e-9) {
    throw GeometryError(GeometryErrc::precondition, "ground direction must be a unit vector");
  }
  return make_homogeneous(camera.P().leftCols<2>() * d);
}

}  // namespace kinevent
