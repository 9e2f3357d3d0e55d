#include "floatgrip/dynamics.hpp"

#include <Eigen/LU>

#include "floatgrip/errors.hpp"

namespace floatgrip {

std::vector<Mat6> world_inertias(const ModelDef& model, const std::vector<Pose>& poses) {
  std::vector<Mat6> out(model.links.size());
  for (std::size_t i = 0; i < model.links.size(); ++i) {
    out[i] = transform_inertia(model.links[i].inertia, poses[i]).to_matrix();
  }
  return out;
}

std::vector<Vec6> link_velocities(const ModelDef& model, const std::vector<Pose>& poses,
                                  const Eigen::VectorXd& v) {
  std::vector<Vec6> vel(model.links.size());
  for (std::size_t i = 0; i < model.links.size(); ++i) {
    const LinkDef& link = model.links[i];
    Vec6 vi = link.parent_index >= 0 ? vel[link.parent_index] : Vec6::Zero();
    const int dof = link.joint.dof();
    if (dof > 0) {
      vi += motion_subspace(model, static_cast<int>(i), poses[i]) * v.segment(link.v_offset, dof);
    }
    vel[i] = vi;
  }
  return vel;
}

namespace {

// Sum of the world-frame inertias of every link in the subtree of each link.
std::vector<Mat6> composite_inertias(const ModelDef& model, std::vector<Mat6> inertias) {
  for (std::size_t i = model.links.size(); i-- > 1;) {
    inertias[model.links[i].parent_index] += inertias[i];
  }
  return inertias;
}

}  // namespace

Eigen::MatrixXd mass_matrix(const ModelDef& model, const State& state) {
  const auto poses = forward_kinematics(model, state);
  const auto composite = composite_inertias(model, world_inertias(model, poses));
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(model.nv, model.nv);
  for (std::size_t i = 0; i < model.links.size(); ++i) {
    const LinkDef& link = model.links[i];
    const int dof = link.joint.dof();
    if (dof == 0) continue;
    const auto s = motion_subspace(model, static_cast<int>(i), poses[i]);
    const Eigen::Matrix<double, 6, Eigen::Dynamic> f = composite[i] * s;
    m.block(link.v_offset, link.v_offset, dof, dof) = s.transpose() * f;
    for (int j = link.parent_index; j >= 0; j = model.links[j].parent_index) {
      const LinkDef& up = model.links[j];
      const int up_dof = up.joint.dof();
      if (up_dof == 0) continue;
      const Eigen::MatrixXd block =
          motion_subspace(model, j, poses[j]).transpose() * f;
      m.block(up.v_offset, link.v_offset, up_dof, dof) = block;
      m.block(link.v_offset, up.v_offset, dof, up_dof) = block.transpose();
    }
  }
  return 0.5 * (m + m.transpose());
}

double kinetic_energy(const ModelDef& model, const State& state) {
  const auto poses = forward_kinematics(model, state);
  const auto inertias = world_inertias(model, poses);
  const auto vel = link_velocities(model, poses, state.v);
  double e = 0.0;
  for (std::size_t i = 0; i < vel.size(); ++i) e += 0.5 * vel[i].dot(inertias[i] * vel[i]);
  return e;
}

Eigen::VectorXd bias_forces(const ModelDef& model, const State& state, const Vec3& gravity) {
  const auto poses = forward_kinematics(model, state);
  const auto inertias = world_inertias(model, poses);
  const std::size_t n = model.links.size();
  std::vector<Vec6> vel(n);
  std::vector<Vec6> acc(n);
  std::vector<Vec6> force(n);
  Vec6 world_acc = Vec6::Zero();
  world_acc.tail<3>() = -gravity;

  for (std::size_t i = 0; i < n; ++i) {
    const LinkDef& link = model.links[i];
    const int dof = link.joint.dof();
    Vec6 v = link.parent_index >= 0 ? vel[link.parent_index] : Vec6::Zero();
    Vec6 a = link.parent_index >= 0 ? acc[link.parent_index] : world_acc;
    if (dof > 0) {
      const Eigen::VectorXd qd = state.v.segment(link.v_offset, dof);
      const auto s = motion_subspace(model, static_cast<int>(i), poses[i]);
      const Vec6 joint_vel = s * qd;
      v += joint_vel;
      if (link.joint.kind == JointKind::Free) {
        // Angular columns carry p x w; their rate is v_origin x w.
        a.tail<3>() += qd.head<3>().cross(qd.tail<3>());
      } else {
        a += cross_motion(v) * joint_vel;
      }
    }
    vel[i] = v;
    acc[i] = a;
    force[i] = inertias[i] * a + cross_force(v) * (inertias[i] * v);
  }

  Eigen::VectorXd tau = Eigen::VectorXd::Zero(model.nv);
  for (std::size_t i = n; i-- > 0;) {
    const LinkDef& link = model.links[i];
    const int dof = link.joint.dof();
    if (dof > 0) {
      tau.segment(link.v_offset, dof) =
          motion_subspace(model, static_cast<int>(i), poses[i]).transpose() * force[i];
    }
    if (link.parent_index >= 0) force[link.parent_index] += force[i];
  }
  return tau;
}

MomentumRecord total_momentum(const ModelDef& model, const State& state) {
  const auto poses = forward_kinematics(model, state);
  const auto inertias = world_inertias(model, poses);
  const auto vel = link_velocities(model, poses, state.v);
  Vec6 h = Vec6::Zero();
  for (std::size_t i = 0; i < vel.size(); ++i) h += inertias[i] * vel[i];
  return {h.tail<3>(), h.head<3>(), state.t};
}

namespace {

Wrench world_wrench_about_origin(const Pose& base, const Wrench& base_wrench) {
  return transform(base, base_wrench);
}

}  // namespace

Eigen::VectorXd thrust_generalized_force(const ModelDef& model, const State& state,
                                         const Wrench& base_wrench) {
  const Pose base = base_pose(model, state);
  const Vec6 f = world_wrench_about_origin(base, base_wrench).to_vector();
  Eigen::VectorXd tau = Eigen::VectorXd::Zero(model.nv);
  const LinkDef& root = model.links.front();
  tau.segment<6>(root.v_offset) = motion_subspace(model, 0, base).transpose() * f;
  return tau;
}

StepSystem::StepSystem(const ModelDef& model, const State& state, const StepForces& forces,
                       const std::optional<ThrusterCommand>& thrust, double dt,
                       const Vec3& gravity)
    : model_(&model), state_(state), dt_(dt), gravity_(gravity) {
  if (!(dt > 0.0)) throw NumericalError("time step must be positive");
  poses_ = forward_kinematics(model, state);
  const int nv = model.nv;

  Eigen::VectorXd passive = Eigen::VectorXd::Zero(nv);
  for (const auto& link : model.links) {
    if (link.joint.dof() == 1) passive[link.v_offset] = link.joint.damping;
  }
  Eigen::VectorXd damping = passive;
  if (forces.damping.size() == nv) damping += forces.damping;
  Eigen::VectorXd stiffness = Eigen::VectorXd::Zero(nv);
  if (forces.stiffness.size() == nv) stiffness = forces.stiffness;

  effective_mass_ = mass_matrix(model, state);
  effective_mass_.diagonal() += dt * damping + dt * dt * stiffness;

  Eigen::VectorXd rhs = -bias_forces(model, state, gravity);
  if (forces.tau.size() == nv) rhs += forces.tau;
  rhs -= passive.cwiseProduct(state.v);
  rhs -= dt * stiffness.cwiseProduct(state.v);

  world_thrust_ = Wrench{};
  if (thrust && thrust->active(state.t)) {
    rhs += thrust_generalized_force(model, state, thrust->wrench);
    world_thrust_ = world_wrench_about_origin(poses_.front(), thrust->wrench);
  }
  rhs *= dt;

  factor_.compute(effective_mass_);
  if (factor_.info() != Eigen::Success) {
    throw NumericalError("mass matrix is not positive definite");
  }
  free_velocity_ = state.v + factor_.solve(rhs);
  momentum_ = total_momentum(model, state);
}

Eigen::MatrixXd StepSystem::solve(const Eigen::MatrixXd& rhs) const {
  return factor_.solve(rhs);
}

MomentumRecord StepSystem::momentum_target(const std::vector<AppliedImpulse>& impulses) const {
  MomentumRecord h = momentum_;
  h.t = state_.t + dt_;
  h.linear += dt_ * world_thrust_.force;
  h.angular += dt_ * world_thrust_.torque;
  for (const auto& p : impulses) {
    h.linear += p.impulse;
    h.angular += p.point.cross(p.impulse);
  }
  if (!gravity_.isZero(0.0)) {
    double mass = 0.0;
    Vec3 moment = Vec3::Zero();
    for (std::size_t i = 0; i < model_->links.size(); ++i) {
      const double m = model_->links[i].inertia.mass;
      mass += m;
      moment += m * poses_[i].apply(model_->links[i].inertia.com);
    }
    h.linear += dt_ * mass * gravity_;
    h.angular += dt_ * moment.cross(gravity_);
  }
  return h;
}

State finish_step(const StepSystem& system, const std::vector<AppliedImpulse>& impulses) {
  const ModelDef& model = system.model();
  const State& start = system.state();
  Eigen::VectorXd generalized = Eigen::VectorXd::Zero(model.nv);
  for (const auto& p : impulses) {
    generalized += point_jacobian(model, system.poses(), p.link, p.point).transpose() * p.impulse;
  }
  State next;
  next.v = system.free_velocity();
  if (!impulses.empty()) next.v += system.solve(generalized);
  next.q = start.q;
  integrate_positions(model, next.q, next.v, system.dt());
  next.t = start.t + system.dt();
  enforce_joint_limits(model, next);

  // Base-velocity correction: restore the momentum balance exactly at the
  // new configuration.
  const MomentumRecord target = system.momentum_target(impulses);
  const MomentumRecord actual = total_momentum(model, next);
  Vec6 error;
  error << target.angular - actual.angular, target.linear - actual.linear;
  const auto poses = forward_kinematics(model, next);
  Mat6 total = Mat6::Zero();
  for (const Mat6& i : world_inertias(model, poses)) total += i;
  const Mat6 base_map = total * motion_subspace(model, 0, poses.front());
  const Vec6 correction = base_map.partialPivLu().solve(error);
  next.v.segment<6>(model.links.front().v_offset) += correction;
  if (!next.v.allFinite() || !next.q.allFinite()) {
    throw NumericalError("non-finite state after step");
  }
  return next;
}

State forward_dynamics(const ModelDef& model, const State& state, const StepForces& forces,
                       const std::vector<AppliedImpulse>& impulses,
                       const std::optional<ThrusterCommand>& thrust, double dt,
                       const Vec3& gravity) {
  const StepSystem system(model, state, forces, thrust, dt, gravity);
  return finish_step(system, impulses);
}

}  // namespace floatgrip
