#pragma once

// Kinematic-tree model: link/joint/geometry definitions, generalized state,
// forward kinematics and point Jacobians.
//
// Generalized coordinates. A free joint contributes 7 positions
// (x, y, z, qw, qx, qy, qz) and 6 velocities: the world-frame linear velocity
// of the link origin followed by the world-frame angular velocity. Revolute
// and prismatic joints contribute one of each; fixed joints none.

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "floatgrip/spatial.hpp"

namespace floatgrip {

enum class JointKind { Free, Revolute, Prismatic, Fixed };

std::string_view to_string(JointKind kind);

struct JointLimits {
  double lo = 0.0;
  double hi = 0.0;
  friend bool operator==(const JointLimits&, const JointLimits&) = default;
};

/// One actuator command shared by several joints, each following
/// `ratio * command`.
struct Coupling {
  std::string group;
  double ratio = 1.0;
  friend bool operator==(const Coupling&, const Coupling&) = default;
};

/// Joint positions used by gripper open/close commands.
struct GripTargets {
  double open = 0.0;
  double close = 0.0;
  friend bool operator==(const GripTargets&, const GripTargets&) = default;
};

/// Joints take the name of the link they move.
struct JointDef {
  JointKind kind = JointKind::Fixed;
  Vec3 axis = Vec3::UnitZ();
  std::optional<JointLimits> limits;
  /// Passive viscous damping (N*m*s/rad or N*s/m).
  double damping = 0.0;
  bool actuated = false;
  std::optional<Coupling> coupling;
  /// Series-elastic actuator: stiffness toward command, damping, saturation.
  double stiffness = 0.0;
  double actuator_damping = 0.0;
  double torque_limit = 0.0;
  std::optional<GripTargets> grip;

  int dof() const;
  int position_count() const;
};

enum class Shape { Sphere, Capsule, Cylinder, Box };

std::string_view to_string(Shape shape);
/// Number of size parameters: sphere r; capsule/cylinder r, half-length;
/// box half-extents.
int size_count(Shape shape);

/// Capsules and cylinders are aligned with their local z axis.
struct GeomDef {
  Shape shape = Shape::Sphere;
  std::vector<double> size;
  Pose local_pose;
  std::string material;

  double radius() const { return size.at(0); }
  double half_length() const { return size.at(1); }
  Vec3 half_extents() const { return {size.at(0), size.at(1), size.at(2)}; }
};

struct Material {
  std::string name;
  double stiffness = 1e5;
  double damping = 0.0;
  double friction = 0.8;
};

struct LinkDef {
  std::string name;
  /// Empty means the world.
  std::string parent;
  JointDef joint;
  SpatialInertia inertia;
  /// Joint frame in the parent frame; for the free root this is the initial
  /// base pose.
  Pose joint_pose;
  std::vector<GeomDef> geoms;

  // Derived by finalize_model.
  int parent_index = -1;
  int q_offset = 0;
  int v_offset = 0;
};

struct ModelDef {
  std::vector<LinkDef> links;
  std::vector<Material> materials;
  std::vector<GeomDef> static_geoms;

  // Derived by finalize_model.
  int nq = 0;
  int nv = 0;

  int link_index(std::string_view name) const;
  const Material* find_material(std::string_view name) const;
  /// Actuated joints in link order, as link indices.
  std::vector<int> actuated_links() const;
  /// True if `ancestor` lies on the path from the root to `link` (inclusive).
  bool is_ancestor(int ancestor, int link) const;
};

/// Validates the tree and fills the derived fields. Throws ModelError.
void finalize_model(ModelDef& model);

struct State {
  Eigen::VectorXd q;
  Eigen::VectorXd v;
  double t = 0.0;
};

/// Zero joint positions and velocities, base at its declared initial pose.
State initial_state(const ModelDef& model);

/// Root pose from the free-joint coordinates.
Pose base_pose(const ModelDef& model, const State& state);
void set_base_pose(const ModelDef& model, State& state, const Pose& pose);

/// q <- q (+) dt * v: free joints via the exponential map.
void integrate_positions(const ModelDef& model, Eigen::VectorXd& q,
                         const Eigen::VectorXd& v, double dt);

/// World pose of every link. Throws ModelError on a dimension mismatch.
std::vector<Pose> forward_kinematics(const ModelDef& model, const State& state);

/// World-frame joint motion subspace of one link (6 x dof), spatial vectors
/// referenced to the world origin.
Eigen::Matrix<double, 6, Eigen::Dynamic> motion_subspace(const ModelDef& model, int link,
                                                         const Pose& link_pose);

/// Spatial Jacobian (6 x nv) of a link: maps v to the link's spatial velocity
/// about the world origin.
Eigen::MatrixXd link_jacobian(const ModelDef& model, const std::vector<Pose>& poses,
                              int link);

/// Linear velocity Jacobian (3 x nv) of the material point of `link` that
/// currently sits at world position `point`.
Eigen::MatrixXd point_jacobian(const ModelDef& model, const std::vector<Pose>& poses,
                               int link, const Vec3& point);
Eigen::MatrixXd point_jacobian(const ModelDef& model, const State& state,
                               std::string_view link, const Vec3& point);

/// Applies the joint-limit policy: clamp positions, zero velocity into the
/// limit. Returns true if anything was clamped.
bool enforce_joint_limits(const ModelDef& model, State& state);

}  // namespace floatgrip
