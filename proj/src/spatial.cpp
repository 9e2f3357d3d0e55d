#include "floatgrip/spatial.hpp"

#include <Eigen/Cholesky>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace floatgrip {

bool is_finite(const Vec3& v) {
  return std::isfinite(v.x()) && std::isfinite(v.y()) && std::isfinite(v.z());
}

Mat3 skew(const Vec3& a) {
  Mat3 m;
  m << 0.0, -a.z(), a.y(),
       a.z(), 0.0, -a.x(),
       -a.y(), a.x(), 0.0;
  return m;
}

UnitQuaternion::UnitQuaternion(double w, double x, double y, double z) {
  const double n = std::sqrt(w * w + x * x + y * y + z * z);
  if (!std::isfinite(n) || n == 0.0) {
    throw std::invalid_argument("quaternion must be finite and nonzero");
  }
  // Inputs already unit to within rounding are kept bit-exact so that
  // printed-and-reparsed orientations compare equal.
  const double sign = w < 0.0 ? -1.0 : 1.0;
  const double s = std::abs(n - 1.0) <= 4.0 * std::numeric_limits<double>::epsilon()
                       ? sign
                       : sign / n;
  w_ = w * s;
  x_ = x * s;
  y_ = y * s;
  z_ = z * s;
}

UnitQuaternion UnitQuaternion::from_axis_angle(const Vec3& axis, double angle) {
  const double n = axis.norm();
  if (n == 0.0) return {};
  const Vec3 u = axis / n;
  const double h = 0.5 * angle;
  const double s = std::sin(h);
  return {std::cos(h), u.x() * s, u.y() * s, u.z() * s};
}

UnitQuaternion UnitQuaternion::from_rotation_matrix(const Mat3& r) {
  const Eigen::Quaterniond q(r);
  return {q.w(), q.x(), q.y(), q.z()};
}

Mat3 UnitQuaternion::to_rotation_matrix() const {
  const double ww = w_ * w_, xx = x_ * x_, yy = y_ * y_, zz = z_ * z_;
  const double xy = x_ * y_, xz = x_ * z_, yz = y_ * z_;
  const double wx = w_ * x_, wy = w_ * y_, wz = w_ * z_;
  Mat3 m;
  m << ww + xx - yy - zz, 2.0 * (xy - wz), 2.0 * (xz + wy),
       2.0 * (xy + wz), ww - xx + yy - zz, 2.0 * (yz - wx),
       2.0 * (xz - wy), 2.0 * (yz + wx), ww - xx - yy + zz;
  return m;
}

Vec3 UnitQuaternion::rotate(const Vec3& v) const {
  // v + 2 u x (u x v + w v)
  const Vec3 u(x_, y_, z_);
  const Vec3 t = 2.0 * u.cross(v);
  return v + w_ * t + u.cross(t);
}

UnitQuaternion UnitQuaternion::conjugate() const {
  return {w_, -x_, -y_, -z_};
}

double UnitQuaternion::norm() const {
  return std::sqrt(w_ * w_ + x_ * x_ + y_ * y_ + z_ * z_);
}

UnitQuaternion operator*(const UnitQuaternion& a, const UnitQuaternion& b) {
  return {a.w_ * b.w_ - a.x_ * b.x_ - a.y_ * b.y_ - a.z_ * b.z_,
          a.w_ * b.x_ + a.x_ * b.w_ + a.y_ * b.z_ - a.z_ * b.y_,
          a.w_ * b.y_ - a.x_ * b.z_ + a.y_ * b.w_ + a.z_ * b.x_,
          a.w_ * b.z_ + a.x_ * b.y_ - a.y_ * b.x_ + a.z_ * b.w_};
}

UnitQuaternion exp_map(const Vec3& rotation_vector) {
  const double angle = rotation_vector.norm();
  if (angle == 0.0) return {};
  return UnitQuaternion::from_axis_angle(rotation_vector / angle, angle);
}

UnitQuaternion integrate_orientation(const UnitQuaternion& orientation,
                                     const Vec3& omega, double dt) {
  if (omega.isZero(0.0)) return orientation;
  return exp_map(omega * dt) * orientation;
}

double angle_between(const UnitQuaternion& a, const UnitQuaternion& b) {
  const UnitQuaternion d = a.conjugate() * b;
  const double v = std::sqrt(d.x() * d.x() + d.y() * d.y() + d.z() * d.z());
  return 2.0 * std::atan2(v, d.w());
}

Pose compose(const Pose& a, const Pose& b) {
  return {a.rotation * b.rotation, a.rotation.rotate(b.translation) + a.translation};
}

Pose invert(const Pose& p) {
  const UnitQuaternion r = p.rotation.conjugate();
  return {r, -r.rotate(p.translation)};
}

Vec6 Twist::to_vector() const {
  Vec6 v;
  v << angular, linear;
  return v;
}

Twist Twist::from_vector(const Vec6& v) {
  return {v.head<3>(), v.tail<3>()};
}

Vec6 Wrench::to_vector() const {
  Vec6 f;
  f << torque, force;
  return f;
}

Wrench Wrench::from_vector(const Vec6& f) {
  return {f.head<3>(), f.tail<3>()};
}

Twist transform(const Pose& a_from_b, const Twist& t) {
  const Vec3 w = a_from_b.rotation.rotate(t.angular);
  const Vec3 v = a_from_b.rotation.rotate(t.linear) + a_from_b.translation.cross(w);
  return {w, v};
}

Wrench transform(const Pose& a_from_b, const Wrench& w) {
  const Vec3 f = a_from_b.rotation.rotate(w.force);
  const Vec3 n = a_from_b.rotation.rotate(w.torque) + a_from_b.translation.cross(f);
  return {n, f};
}

double power(const Wrench& w, const Twist& t) {
  return w.torque.dot(t.angular) + w.force.dot(t.linear);
}

Mat6 cross_motion(const Vec6& v) {
  Mat6 m = Mat6::Zero();
  const Mat3 w = skew(v.head<3>());
  m.topLeftCorner<3, 3>() = w;
  m.bottomLeftCorner<3, 3>() = skew(v.tail<3>());
  m.bottomRightCorner<3, 3>() = w;
  return m;
}

Mat6 cross_force(const Vec6& v) {
  return -cross_motion(v).transpose();
}

void SpatialInertia::validate() const {
  if (!(mass > 0.0) || !std::isfinite(mass)) {
    throw std::invalid_argument("mass must be positive");
  }
  if (!is_finite(com) || !rot_inertia.allFinite()) {
    throw std::invalid_argument("inertia must be finite");
  }
  const double scale = std::max(1.0, rot_inertia.cwiseAbs().maxCoeff());
  if ((rot_inertia - rot_inertia.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
    throw std::invalid_argument("rotational inertia must be symmetric");
  }
  const Eigen::LLT<Mat3> llt(rot_inertia);
  if (llt.info() != Eigen::Success) {
    throw std::invalid_argument("rotational inertia must be positive definite");
  }
}

Mat6 SpatialInertia::to_matrix() const {
  const Mat3 c = skew(com);
  Mat6 m;
  m.topLeftCorner<3, 3>() = rot_inertia - mass * c * c;
  m.topRightCorner<3, 3>() = mass * c;
  m.bottomLeftCorner<3, 3>() = -mass * c;
  m.bottomRightCorner<3, 3>() = mass * Mat3::Identity();
  return m;
}

double SpatialInertia::kinetic_energy(const Twist& v) const {
  const Vec3 vc = v.linear + v.angular.cross(com);
  return 0.5 * (mass * vc.squaredNorm() + v.angular.dot(rot_inertia * v.angular));
}

SpatialInertia transform_inertia(const SpatialInertia& inertia, const Pose& a_from_b) {
  const Mat3 r = a_from_b.rotation.to_rotation_matrix();
  SpatialInertia out;
  out.mass = inertia.mass;
  out.com = a_from_b.apply(inertia.com);
  out.rot_inertia = r * inertia.rot_inertia * r.transpose();
  out.rot_inertia = 0.5 * (out.rot_inertia + out.rot_inertia.transpose()).eval();
  return out;
}

}  // namespace floatgrip
