#include "floatgrip/model.hpp"

#include <cmath>
#include <set>

#include "floatgrip/errors.hpp"

namespace floatgrip {

std::string_view to_string(JointKind kind) {
  switch (kind) {
    case JointKind::Free: return "free";
    case JointKind::Revolute: return "revolute";
    case JointKind::Prismatic: return "prismatic";
    case JointKind::Fixed: return "fixed";
  }
  return "?";
}

std::string_view to_string(Shape shape) {
  switch (shape) {
    case Shape::Sphere: return "sphere";
    case Shape::Capsule: return "capsule";
    case Shape::Cylinder: return "cylinder";
    case Shape::Box: return "box";
  }
  return "?";
}

int size_count(Shape shape) {
  switch (shape) {
    case Shape::Sphere: return 1;
    case Shape::Capsule:
    case Shape::Cylinder: return 2;
    case Shape::Box: return 3;
  }
  return 0;
}

int JointDef::dof() const {
  switch (kind) {
    case JointKind::Free: return 6;
    case JointKind::Revolute:
    case JointKind::Prismatic: return 1;
    case JointKind::Fixed: return 0;
  }
  return 0;
}

int JointDef::position_count() const {
  return kind == JointKind::Free ? 7 : dof();
}

int ModelDef::link_index(std::string_view name) const {
  for (std::size_t i = 0; i < links.size(); ++i) {
    if (links[i].name == name) return static_cast<int>(i);
  }
  return -1;
}

const Material* ModelDef::find_material(std::string_view name) const {
  for (const auto& m : materials) {
    if (m.name == name) return &m;
  }
  return nullptr;
}

std::vector<int> ModelDef::actuated_links() const {
  std::vector<int> out;
  for (std::size_t i = 0; i < links.size(); ++i) {
    if (links[i].joint.actuated) out.push_back(static_cast<int>(i));
  }
  return out;
}

bool ModelDef::is_ancestor(int ancestor, int link) const {
  for (int k = link; k >= 0; k = links[k].parent_index) {
    if (k == ancestor) return true;
  }
  return false;
}

namespace {

void check_geom(const GeomDef& g, const ModelDef& model, const std::string& owner,
                std::size_t index) {
  const std::string subject = "geom:" + owner + ":" + std::to_string(index);
  if (static_cast<int>(g.size.size()) != size_count(g.shape)) {
    throw ModelError("geom on '" + owner + "': " + std::string(to_string(g.shape)) +
                     " expects " + std::to_string(size_count(g.shape)) + " sizes", subject);
  }
  for (double s : g.size) {
    if (!(s > 0.0) || !std::isfinite(s)) {
      throw ModelError("geom on '" + owner + "': sizes must be positive", subject);
    }
  }
  if (!is_finite(g.local_pose.translation)) {
    throw ModelError("geom on '" + owner + "': non-finite position", subject);
  }
  if (model.find_material(g.material) == nullptr) {
    throw ModelError("geom on '" + owner + "': unknown material '" + g.material + "'", subject);
  }
}

}  // namespace

void finalize_model(ModelDef& model) {
  if (model.links.empty()) throw ModelError("model has no links");

  std::set<std::string> material_names;
  for (const auto& m : model.materials) {
    const std::string subject = "material:" + m.name;
    if (m.name.empty()) throw ModelError("material without a name", subject);
    if (!material_names.insert(m.name).second) {
      throw ModelError("duplicate material name '" + m.name + "'", subject);
    }
    if (!(m.stiffness > 0.0) || !(m.damping >= 0.0) || !(m.friction >= 0.0)) {
      throw ModelError("material '" + m.name +
                       "': need stiffness > 0, damping >= 0, friction >= 0",
                       subject);
    }
  }

  std::set<std::string> names;
  int nq = 0;
  int nv = 0;
  for (std::size_t i = 0; i < model.links.size(); ++i) {
    LinkDef& link = model.links[i];
    if (link.name.empty() || link.name == "world") {
      throw ModelError("invalid link name '" + link.name + "'", link.name);
    }
    if (!names.insert(link.name).second) {
      throw ModelError("duplicate link name '" + link.name + "'", link.name);
    }
    const JointDef& j = link.joint;
    if (j.kind == JointKind::Free) {
      if (i != 0 || !link.parent.empty()) {
        throw ModelError("free joint on '" + link.name + "' must be the root link", link.name);
      }
    } else if (i == 0) {
      throw ModelError("root link '" + link.name + "' must have a free joint", link.name);
    }
    if (i > 0) {
      if (link.parent.empty()) {
        throw ModelError("link '" + link.name + "' must have a parent link", link.name);
      }
      const int p = model.link_index(link.parent);
      if (p < 0) {
        // Either missing or declared later, which would permit cycles.
        throw ModelError("link '" + link.name + "': parent '" + link.parent +
                         "' is not declared before it", link.name);
      }
      link.parent_index = p;
    } else {
      link.parent_index = -1;
    }
    if (!is_finite(j.axis) || std::abs(j.axis.norm() - 1.0) > 1e-9) {
      throw ModelError("joint '" + link.name + "': axis must be unit length", link.name);
    }
    if (j.limits && !(j.limits->lo <= j.limits->hi)) {
      throw ModelError("joint '" + link.name + "': limits need lo <= hi", link.name);
    }
    if (!(j.damping >= 0.0)) {
      throw ModelError("joint '" + link.name + "': damping must be >= 0", link.name);
    }
    if (j.actuated) {
      if (j.dof() != 1) {
        throw ModelError("joint '" + link.name + "': only 1-dof joints can be actuated", link.name);
      }
      if (!(j.stiffness > 0.0) || !(j.actuator_damping >= 0.0) || !(j.torque_limit > 0.0)) {
        throw ModelError("joint '" + link.name +
                         "': actuator needs kp > 0, kv >= 0, taumax > 0", link.name);
      }
    }
    if (j.coupling && !j.actuated) {
      throw ModelError("joint '" + link.name + "': coupling requires an actuated joint", link.name);
    }
    if (j.coupling && (j.coupling->group.empty() || !std::isfinite(j.coupling->ratio) ||
                       j.coupling->ratio == 0.0)) {
      throw ModelError("joint '" + link.name + "': invalid coupling", link.name);
    }
    if (j.grip && !j.actuated) {
      throw ModelError("joint '" + link.name + "': grip targets require an actuated joint", link.name);
    }
    try {
      link.inertia.validate();
    } catch (const std::invalid_argument& e) {
      throw ModelError("link '" + link.name + "': " + e.what(), link.name);
    }
    if (!is_finite(link.joint_pose.translation)) {
      throw ModelError("link '" + link.name + "': non-finite position", link.name);
    }
    for (std::size_t g = 0; g < link.geoms.size(); ++g) {
      check_geom(link.geoms[g], model, link.name, g);
    }
    link.q_offset = nq;
    link.v_offset = nv;
    nq += j.position_count();
    nv += j.dof();
  }
  for (std::size_t g = 0; g < model.static_geoms.size(); ++g) {
    check_geom(model.static_geoms[g], model, "world", g);
  }
  model.nq = nq;
  model.nv = nv;
}

State initial_state(const ModelDef& model) {
  State s;
  s.q = Eigen::VectorXd::Zero(model.nq);
  s.v = Eigen::VectorXd::Zero(model.nv);
  set_base_pose(model, s, model.links.front().joint_pose);
  return s;
}

Pose base_pose(const ModelDef& model, const State& state) {
  const int o = model.links.front().q_offset;
  return {UnitQuaternion(state.q[o + 3], state.q[o + 4], state.q[o + 5], state.q[o + 6]),
          state.q.segment<3>(o)};
}

void set_base_pose(const ModelDef& model, State& state, const Pose& pose) {
  const int o = model.links.front().q_offset;
  state.q.segment<3>(o) = pose.translation;
  state.q[o + 3] = pose.rotation.w();
  state.q[o + 4] = pose.rotation.x();
  state.q[o + 5] = pose.rotation.y();
  state.q[o + 6] = pose.rotation.z();
}

void integrate_positions(const ModelDef& model, Eigen::VectorXd& q,
                         const Eigen::VectorXd& v, double dt) {
  for (const auto& link : model.links) {
    const int qo = link.q_offset;
    const int vo = link.v_offset;
    switch (link.joint.kind) {
      case JointKind::Free: {
        q.segment<3>(qo) += dt * v.segment<3>(vo);
        const UnitQuaternion r(q[qo + 3], q[qo + 4], q[qo + 5], q[qo + 6]);
        const UnitQuaternion r1 = integrate_orientation(r, v.segment<3>(vo + 3), dt);
        q[qo + 3] = r1.w();
        q[qo + 4] = r1.x();
        q[qo + 5] = r1.y();
        q[qo + 6] = r1.z();
        break;
      }
      case JointKind::Revolute:
      case JointKind::Prismatic:
        q[qo] += dt * v[vo];
        break;
      case JointKind::Fixed:
        break;
    }
  }
}

std::vector<Pose> forward_kinematics(const ModelDef& model, const State& state) {
  if (state.q.size() != model.nq || state.v.size() != model.nv) {
    throw ModelError("state dimensions (" + std::to_string(state.q.size()) + ", " +
                     std::to_string(state.v.size()) + ") do not match model (" +
                     std::to_string(model.nq) + ", " + std::to_string(model.nv) + ")");
  }
  std::vector<Pose> poses(model.links.size());
  for (std::size_t i = 0; i < model.links.size(); ++i) {
    const LinkDef& link = model.links[i];
    const JointDef& j = link.joint;
    if (j.kind == JointKind::Free) {
      poses[i] = base_pose(model, state);
      continue;
    }
    const Pose& parent = poses[link.parent_index];
    Pose joint_frame = compose(parent, link.joint_pose);
    const double x = j.dof() == 1 ? state.q[link.q_offset] : 0.0;
    switch (j.kind) {
      case JointKind::Revolute:
        poses[i] = compose(joint_frame,
                           Pose::from_rotation(UnitQuaternion::from_axis_angle(j.axis, x)));
        break;
      case JointKind::Prismatic:
        poses[i] = compose(joint_frame, Pose::from_translation(j.axis * x));
        break;
      default:
        poses[i] = joint_frame;
        break;
    }
  }
  return poses;
}

Eigen::Matrix<double, 6, Eigen::Dynamic> motion_subspace(const ModelDef& model, int link,
                                                         const Pose& link_pose) {
  const JointDef& j = model.links[link].joint;
  Eigen::Matrix<double, 6, Eigen::Dynamic> s(6, j.dof());
  const Vec3& p = link_pose.translation;
  switch (j.kind) {
    case JointKind::Free:
      // Linear columns: world velocity of the link origin. Angular columns:
      // world angular velocity about the link origin.
      s.setZero();
      s.block<3, 3>(3, 0) = Mat3::Identity();
      s.block<3, 3>(0, 3) = Mat3::Identity();
      s.block<3, 3>(3, 3) = skew(p);
      break;
    case JointKind::Revolute: {
      const Vec3 a = link_pose.apply_rotation(j.axis);
      s.col(0) << a, p.cross(a);
      break;
    }
    case JointKind::Prismatic: {
      const Vec3 a = link_pose.apply_rotation(j.axis);
      s.col(0) << Vec3::Zero(), a;
      break;
    }
    case JointKind::Fixed:
      break;
  }
  return s;
}

Eigen::MatrixXd link_jacobian(const ModelDef& model, const std::vector<Pose>& poses,
                              int link) {
  Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(6, model.nv);
  for (int k = link; k >= 0; k = model.links[k].parent_index) {
    const int dof = model.links[k].joint.dof();
    if (dof == 0) continue;
    jac.middleCols(model.links[k].v_offset, dof) = motion_subspace(model, k, poses[k]);
  }
  return jac;
}

Eigen::MatrixXd point_jacobian(const ModelDef& model, const std::vector<Pose>& poses,
                               int link, const Vec3& point) {
  const Eigen::MatrixXd spatial = link_jacobian(model, poses, link);
  // v_point = v_origin + w x point
  return spatial.bottomRows(3) - skew(point) * spatial.topRows(3);
}

Eigen::MatrixXd point_jacobian(const ModelDef& model, const State& state,
                               std::string_view link, const Vec3& point) {
  const int index = model.link_index(link);
  if (index < 0) throw ModelError("unknown link '" + std::string(link) + "'");
  return point_jacobian(model, forward_kinematics(model, state), index, point);
}

bool enforce_joint_limits(const ModelDef& model, State& state) {
  bool clamped = false;
  for (const auto& link : model.links) {
    const JointDef& j = link.joint;
    if (!j.limits || j.dof() != 1) continue;
    double& x = state.q[link.q_offset];
    double& xd = state.v[link.v_offset];
    if (x < j.limits->lo) {
      x = j.limits->lo;
      if (xd < 0.0) xd = 0.0;
      clamped = true;
    } else if (x > j.limits->hi) {
      x = j.limits->hi;
      if (xd > 0.0) xd = 0.0;
      clamped = true;
    }
  }
  return clamped;
}

}  // namespace floatgrip
