#include "floatgrip/astrobee.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "floatgrip/scenario.hpp"

namespace floatgrip {
namespace {

using std::numbers::pi;

// Capsule and cylinder geoms run along local z; these orient it.
const UnitQuaternion kAlongMinusX = UnitQuaternion::from_axis_angle(Vec3::UnitY(), -pi / 2);
const UnitQuaternion kAlongY = UnitQuaternion::from_axis_angle(Vec3::UnitX(), -pi / 2);

SpatialInertia rod_inertia(double mass, double length, double radius, const Vec3& com) {
  SpatialInertia in;
  in.mass = mass;
  in.com = com;
  const double axial = 0.5 * mass * radius * radius;
  const double transverse = mass * (3 * radius * radius + length * length) / 12.0;
  in.rot_inertia = Vec3(axial, transverse, transverse).asDiagonal();
  return in;
}

SpatialInertia point_inertia(double mass) {
  SpatialInertia in;
  in.mass = mass;
  in.com = Vec3::Zero();
  in.rot_inertia = Mat3::Identity() * 1e-7;
  return in;
}

LinkDef make_link(const std::string& name, const std::string& parent, JointKind kind,
                  const Vec3& axis, const Vec3& offset, const SpatialInertia& inertia) {
  LinkDef l;
  l.name = name;
  l.parent = parent;
  l.joint.kind = kind;
  l.joint.axis = axis;
  l.joint_pose = Pose::from_translation(offset);
  l.inertia = inertia;
  return l;
}

void actuate(LinkDef& l, double k, double d, double tau_max, double lo, double hi) {
  l.joint.actuated = true;
  l.joint.stiffness = k;
  l.joint.actuator_damping = d;
  l.joint.torque_limit = tau_max;
  l.joint.limits = JointLimits{lo, hi};
}

GeomDef capsule_along(const UnitQuaternion& orientation, const Vec3& center, double radius,
                      double half_length, const std::string& material) {
  return {Shape::Capsule, {radius, half_length}, Pose{orientation, center}, material};
}

constexpr double kFingerRadius = 0.006;
constexpr double kHingeHeight = 0.024;
constexpr double kHingeSetback = 0.01;
constexpr double kPalmOffset = 0.008;
constexpr double kPalmRadius = 0.01;

// Base, arm and palm shared by both hands; returns the model with the palm as
// the last link.
ModelDef platform(const AstrobeeParams& p) {
  ModelDef m;
  m.materials.push_back({"rubber", p.rubber_stiffness, p.rubber_damping, p.rubber_friction});
  m.materials.push_back({"aluminum", 1e6, 0.0, p.rubber_friction});

  const double reach = 2 * p.arm_link_length + kPalmOffset + kPalmRadius + p.rail_radius;
  LinkDef base;
  base.name = "base";
  base.joint.kind = JointKind::Free;
  base.inertia.mass = p.base_mass;
  base.inertia.com = Vec3::Zero();
  base.inertia.rot_inertia = p.base_inertia.asDiagonal();
  // The palm starts `approach_gap` short of the rail surface.
  base.joint_pose = Pose::from_translation(
      Vec3(-p.arm_mount.x() + reach + p.approach_gap, -p.arm_mount.y(), -p.arm_mount.z()));
  const double h = p.base_half_size;
  base.geoms.push_back({Shape::Box, {h, h, h}, Pose::identity(), "aluminum"});
  m.links.push_back(base);

  const double l = p.arm_link_length;
  LinkDef pan = make_link("pan", "base", JointKind::Revolute, Vec3::UnitZ(), p.arm_mount,
                          rod_inertia(p.arm_link_mass, l, 0.015, Vec3(-l / 2, 0, 0)));
  actuate(pan, p.arm_stiffness, p.arm_damping, p.arm_torque_limit, -1.2, 1.2);
  m.links.push_back(pan);
  LinkDef tilt = make_link("tilt", "pan", JointKind::Revolute, Vec3::UnitY(), Vec3(-l, 0, 0),
                           rod_inertia(p.arm_link_mass, l, 0.015, Vec3(-l / 2, 0, 0)));
  actuate(tilt, p.arm_stiffness, p.arm_damping, p.arm_torque_limit, -1.2, 1.2);
  m.links.push_back(tilt);

  LinkDef palm = make_link("palm", "tilt", JointKind::Fixed, Vec3::UnitZ(), Vec3(-l, 0, 0),
                           rod_inertia(0.1, 0.04, 0.01, Vec3(-0.008, 0, 0)));
  palm.geoms.push_back(
      capsule_along(kAlongY, Vec3(-kPalmOffset, 0, 0), kPalmRadius, 0.02, "rubber"));
  m.links.push_back(palm);

  GeomDef rail{Shape::Cylinder, {p.rail_radius, p.rail_half_length}, Pose{kAlongY, Vec3::Zero()},
               "aluminum"};
  m.static_geoms.push_back(rail);
  return m;
}

}  // namespace

ModelDef build_astrobee_claw(const AstrobeeParams& p) {
  ModelDef m = platform(p);
  // Two straight jaws hinged above and below the palm; one actuator closes
  // both through a 1:1 coupling, pinching the rail against the palm.
  for (int side : {1, -1}) {
    const std::string name = side > 0 ? "claw_upper" : "claw_lower";
    LinkDef f = make_link(name, "palm", JointKind::Revolute, Vec3(0, -side, 0),
                          Vec3(-kHingeSetback, 0, side * kHingeHeight),
                          rod_inertia(0.03, 0.05, kFingerRadius, Vec3(-0.025, 0, 0)));
    actuate(f, p.claw_stiffness, p.claw_damping, p.claw_torque_limit, -0.6, 0.9);
    f.joint.coupling = Coupling{"claw", 1.0};
    f.joint.grip = GripTargets{-0.3, p.claw_close};
    f.geoms.push_back(capsule_along(kAlongMinusX, Vec3(-0.025, 0, 0), kFingerRadius, 0.025, "rubber"));
    m.links.push_back(f);
  }
  finalize_model(m);
  return m;
}

ModelDef build_astrobee_dexcohand(const AstrobeeParams& p) {
  ModelDef m = platform(p);
  // Two fingers side by side along the rail, both hinged above the palm and
  // wrapping over and behind the rail. Each has a universal joint at the
  // proximal link (abduction about z, flexion about y) and a flexing
  // fingertip.
  for (int side : {1, -1}) {
    const std::string f = side > 0 ? "f1" : "f2";
    LinkDef abd = make_link(f + "_abd", "palm", JointKind::Revolute, Vec3::UnitZ(),
                            Vec3(-kHingeSetback, side * p.dex_finger_spacing / 2, kHingeHeight),
                            point_inertia(0.005));
    actuate(abd, p.dex_stiffness, p.dex_damping, p.dex_torque_limit, -0.6, 0.6);
    abd.joint.grip = GripTargets{0.0, -side * p.dex_abduction};
    m.links.push_back(abd);

    const double lp = p.dex_proximal_length;
    const double lt = p.dex_tip_length;
    LinkDef prox = make_link(f + "_prox", f + "_abd", JointKind::Revolute, Vec3(0, -1, 0),
                             Vec3::Zero(), rod_inertia(0.015, lp, kFingerRadius, Vec3(-lp / 2, 0, 0)));
    actuate(prox, p.dex_stiffness, p.dex_damping, p.dex_torque_limit, -0.6, 1.2);
    prox.joint.grip = GripTargets{-0.3, p.dex_proximal_close};
    prox.geoms.push_back(capsule_along(kAlongMinusX, Vec3(-lp / 2, 0, 0), kFingerRadius, lp / 2, "rubber"));
    m.links.push_back(prox);

    LinkDef tip = make_link(f + "_tip", f + "_prox", JointKind::Revolute, Vec3(0, -1, 0),
                            Vec3(-lp, 0, 0),
                            rod_inertia(0.01, lt, p.fingertip_radius, Vec3(-lt / 2, 0, 0)));
    actuate(tip, p.dex_stiffness, p.dex_damping, p.dex_torque_limit, -0.3, 2.6);
    tip.joint.grip = GripTargets{0.0, p.dex_tip_close};
    tip.geoms.push_back(
        capsule_along(kAlongMinusX, Vec3(-lt / 2, 0, 0), p.fingertip_radius, lt / 2, "rubber"));
    m.links.push_back(tip);
  }
  finalize_model(m);
  return m;
}

bool is_builtin_model(std::string_view id) {
  return id == kClawModelId || id == kDexCoHandModelId;
}

ModelDef builtin_model(std::string_view id) {
  if (id == kClawModelId) return build_astrobee_claw();
  if (id == kDexCoHandModelId) return build_astrobee_dexcohand();
  throw std::out_of_range("unknown builtin model '" + std::string(id) + "'");
}

std::vector<int> gripper_links(const ModelDef& model) {
  std::vector<int> out;
  const int palm = model.link_index("palm");
  if (palm < 0) return out;
  for (int i = palm + 1; i < static_cast<int>(model.links.size()); ++i) {
    if (model.is_ancestor(palm, i)) out.push_back(i);
  }
  return out;
}

State perch_configuration(const ModelDef& model) {
  State s = initial_state(model);
  for (int i : gripper_links(model)) {
    const LinkDef& l = model.links[i];
    if (l.joint.grip) s.q[l.q_offset] = l.joint.grip->close;
  }
  return s;
}

std::vector<std::pair<int, Vec3>> fingertip_points(const ModelDef& model,
                                                   const std::vector<Pose>& poses) {
  std::vector<std::pair<int, Vec3>> out;
  const auto links = gripper_links(model);
  for (int i : links) {
    bool leaf = true;
    for (int j : links) {
      if (model.links[j].parent_index == i) leaf = false;
    }
    const auto& geoms = model.links[i].geoms;
    if (!leaf || geoms.empty()) continue;
    const GeomDef& g = geoms.back();
    const Pose world = compose(poses[i], g.local_pose);
    const double reach = g.shape == Shape::Capsule ? g.half_length() : 0.0;
    out.emplace_back(i, world.apply(Vec3(0, 0, reach)));
  }
  return out;
}

}  // namespace floatgrip
