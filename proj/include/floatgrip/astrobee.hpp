#pragma once

// Astrobee free-flyer with its two-joint perching arm, carrying either the
// one-actuator claw or the two-finger, six-joint DexCoHand, in front of a
// fixed handrail.
//
// World frame: the rail lies along y through the origin; the robot starts on
// the +x side with its aft face (base -x) toward the rail. Base frame: origin
// at the centre of mass. The arm pan joint turns about base z, the tilt joint
// about base y (parallel to the rail when perched).

#include <string_view>

#include "floatgrip/model.hpp"

namespace floatgrip {

struct AstrobeeParams {
  double base_mass = 9.58;
  Vec3 base_inertia{0.153, 0.143, 0.162};
  double base_half_size = 0.16;
  /// Arm mount on the aft face, base frame.
  Vec3 arm_mount{-0.16, -0.05, -0.06};
  double arm_link_length = 0.10;
  double arm_link_mass = 0.15;
  double arm_stiffness = 50.0;
  double arm_damping = 10.0;
  double arm_torque_limit = 5.0;

  double rail_radius = 0.011;
  double rail_half_length = 0.30;
  /// Initial clearance between the palm and the rail.
  double approach_gap = 0.02;

  double claw_stiffness = 20.0;
  double claw_damping = 0.5;
  double claw_torque_limit = 2.0;
  double claw_close = 0.65;

  double dex_stiffness = 2.0;
  double dex_damping = 0.1;
  double dex_torque_limit = 2.0;
  double fingertip_radius = 0.008;
  /// Distance between the two finger bases along the rail.
  double dex_finger_spacing = 0.03;
  /// Abduction close target; positive spreads the fingertips apart.
  double dex_abduction = 0.15;
  double dex_proximal_length = 0.045;
  double dex_tip_length = 0.035;
  double dex_proximal_close = 0.5;
  double dex_tip_close = 2.5;

  double rubber_stiffness = 1e5;
  /// Damps the tangential stick spring of rubber contacts.
  double rubber_damping = 1000.0;
  double rubber_friction = 0.8;
};

ModelDef build_astrobee_claw(const AstrobeeParams& params = {});
ModelDef build_astrobee_dexcohand(const AstrobeeParams& params = {});

/// Builtin model by id; throws std::out_of_range when unknown.
ModelDef builtin_model(std::string_view id);
bool is_builtin_model(std::string_view id);

/// Joints that belong to the gripper (everything after the wrist).
std::vector<int> gripper_links(const ModelDef& model);

/// Initial state with every gripper joint at its close target: the nominal
/// grasp used to compare the two hands kinematically.
State perch_configuration(const ModelDef& model);

/// Distal point of each fingertip geom: the nominal fingertip contact.
std::vector<std::pair<int, Vec3>> fingertip_points(const ModelDef& model,
                                                   const std::vector<Pose>& poses);

}  // namespace floatgrip
