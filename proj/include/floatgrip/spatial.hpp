#pragma once

// Spatial algebra primitives: unit quaternions, rigid transforms, twists,
// wrenches and rigid-body inertias. Everything is SI.
//
// Six-dimensional spatial vectors are ordered (angular, linear) throughout.

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace floatgrip {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Vec6 = Eigen::Matrix<double, 6, 1>;
using Mat6 = Eigen::Matrix<double, 6, 6>;

bool is_finite(const Vec3& v);

/// Skew-symmetric cross-product matrix: skew(a) * b == a.cross(b).
Mat3 skew(const Vec3& a);

/// Unit quaternion with the double cover resolved to w >= 0.
class UnitQuaternion {
 public:
  UnitQuaternion() = default;
  /// Normalizes and canonicalizes. Throws std::invalid_argument on a zero or
  /// non-finite input.
  UnitQuaternion(double w, double x, double y, double z);

  static UnitQuaternion identity() { return {}; }
  static UnitQuaternion from_axis_angle(const Vec3& axis, double angle);
  static UnitQuaternion from_rotation_matrix(const Mat3& r);

  double w() const { return w_; }
  double x() const { return x_; }
  double y() const { return y_; }
  double z() const { return z_; }

  Mat3 to_rotation_matrix() const;
  Vec3 rotate(const Vec3& v) const;
  UnitQuaternion conjugate() const;
  double norm() const;

  /// Hamilton product; `a * b` applies b first.
  friend UnitQuaternion operator*(const UnitQuaternion& a, const UnitQuaternion& b);
  friend bool operator==(const UnitQuaternion&, const UnitQuaternion&) = default;

 private:
  double w_ = 1.0;
  double x_ = 0.0;
  double y_ = 0.0;
  double z_ = 0.0;
};

/// Rotation vector (axis * angle) to quaternion, exact.
UnitQuaternion exp_map(const Vec3& rotation_vector);

/// Advances an orientation by a world-frame angular velocity held constant
/// over dt. Exact exponential-map step; omega == 0 returns `orientation`.
UnitQuaternion integrate_orientation(const UnitQuaternion& orientation,
                                     const Vec3& omega, double dt);

/// Smallest angle between two orientations (radians).
double angle_between(const UnitQuaternion& a, const UnitQuaternion& b);

struct Pose {
  UnitQuaternion rotation;
  Vec3 translation = Vec3::Zero();

  static Pose identity() { return {}; }
  static Pose from_translation(const Vec3& t) { return {UnitQuaternion{}, t}; }
  static Pose from_rotation(const UnitQuaternion& r) { return {r, Vec3::Zero()}; }

  Vec3 apply(const Vec3& point) const { return rotation.rotate(point) + translation; }
  Vec3 apply_rotation(const Vec3& direction) const { return rotation.rotate(direction); }
};

/// Applies b then a.
Pose compose(const Pose& a, const Pose& b);
Pose invert(const Pose& p);

struct Twist {
  Vec3 angular = Vec3::Zero();
  Vec3 linear = Vec3::Zero();

  Vec6 to_vector() const;
  static Twist from_vector(const Vec6& v);
};

struct Wrench {
  Vec3 torque = Vec3::Zero();
  Vec3 force = Vec3::Zero();

  Vec6 to_vector() const;
  static Wrench from_vector(const Vec6& f);
};

/// Re-expresses a twist given at the origin of frame B (coordinates in B) in
/// frame A, where `a_from_b` maps B coordinates to A coordinates.
Twist transform(const Pose& a_from_b, const Twist& t);
Wrench transform(const Pose& a_from_b, const Wrench& w);

/// Instantaneous power of a wrench acting on a twist.
double power(const Wrench& w, const Twist& t);

/// Spatial cross products. `cross_motion(v) * m` is the derivative of a
/// motion vector m carried along by velocity v, `cross_force(v) * f` the same
/// for a force vector.
Mat6 cross_motion(const Vec6& v);
Mat6 cross_force(const Vec6& v);

struct SpatialInertia {
  double mass = 1.0;
  Vec3 com = Vec3::Zero();
  /// Rotational inertia about the center of mass.
  Mat3 rot_inertia = Mat3::Identity();

  /// Throws std::invalid_argument unless mass > 0 and rot_inertia is
  /// symmetric positive definite.
  void validate() const;

  /// 6x6 matrix about the frame origin, (angular, linear) ordering.
  Mat6 to_matrix() const;
  /// 0.5 * <v, I v> for a twist about the same frame origin.
  double kinetic_energy(const Twist& v) const;
};

/// Re-expresses an inertia given in frame B in frame A.
SpatialInertia transform_inertia(const SpatialInertia& inertia, const Pose& a_from_b);

}  // namespace floatgrip
