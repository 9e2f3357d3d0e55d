#pragma once

// Joint-space and contact-frame compliance, compliance ellipsoids, and the
// series-elastic actuator model that turns commands into joint torques.

#include <array>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "floatgrip/model.hpp"
#include "floatgrip/spatial.hpp"

namespace floatgrip {

/// Compliance over the actuated joints, in ModelDef::actuated_links() order.
struct JointCompliance {
  Eigen::MatrixXd matrix;
  /// Velocity index of each row/column.
  std::vector<int> columns;
};

/// Diagonal 1/k over the actuated joints of `model`.
JointCompliance joint_compliance(const ModelDef& model);

struct ContactCompliance {
  Mat3 matrix = Mat3::Zero();
};

/// J_a * Cq * J_a^T where J_a holds the columns of `jacobian` (3 x nv) named by
/// `cq.columns`. Throws std::invalid_argument on inconsistent dimensions.
ContactCompliance contact_compliance(const Eigen::MatrixXd& jacobian, const JointCompliance& cq);

/// True when symmetric to 1e-12 and every eigenvalue is >= -1e-10.
bool is_symmetric_psd(const Eigen::MatrixXd& m);

/// Symmetric 3x3 eigendecomposition by cyclic Jacobi rotations. Eigenvalues
/// are sorted descending; eigenvector columns are orthonormal.
struct SymmetricEigen3 {
  Vec3 values = Vec3::Zero();
  Mat3 vectors = Mat3::Identity();
};
SymmetricEigen3 jacobi_eigen(const Mat3& m);

struct ComplianceEllipsoid {
  std::array<Vec3, 3> axes;
  /// m/N, descending, clamped at zero.
  Vec3 radii = Vec3::Zero();
};
ComplianceEllipsoid compliance_ellipsoid(const ContactCompliance& cc);

/// One actuated joint driven as a spring-damper toward `ratio * command`.
struct ActuatedJoint {
  int link = 0;
  int q_index = 0;
  int v_index = 0;
  double ratio = 1.0;
  double stiffness = 0.0;
  double damping = 0.0;
  double torque_limit = 0.0;
};

/// A command channel: either one uncoupled actuated joint (named after it)
/// or a coupling group (named after the group) driving all its members.
struct ActuatorChannel {
  std::string name;
  std::vector<ActuatedJoint> joints;
};

struct ActuatorSet {
  std::vector<ActuatorChannel> channels;

  /// Channel index by name, or -1.
  int find(const std::string& name) const;
};

/// Channels in order of first appearance of their joints in the model.
ActuatorSet actuator_set(const ModelDef& model);

/// Actuator torques plus their diagonal derivatives for implicit
/// integration. Saturated joints report zero stiffness and damping.
struct ActuatorOutput {
  Eigen::VectorXd tau;
  Eigen::VectorXd stiffness;
  Eigen::VectorXd damping;
};

/// tau = clamp(k (ratio * command - theta) - d theta_dot, +-tau_max) for every
/// member of every channel. Throws std::invalid_argument when the command
/// count differs from the channel count.
ActuatorOutput evaluate_actuators(const ActuatorSet& set, int nv, const State& state,
                                  const std::vector<double>& commands);

inline Eigen::VectorXd actuator_torques(const ActuatorSet& set, int nv, const State& state,
                                        const std::vector<double>& commands) {
  return evaluate_actuators(set, nv, state, commands).tau;
}

}  // namespace floatgrip
