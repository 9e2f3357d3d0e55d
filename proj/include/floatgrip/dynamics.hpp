#pragma once

// Floating-base rigid multibody dynamics: composite-rigid-body mass matrix,
// recursive Newton-Euler bias forces, momentum bookkeeping and the
// semi-implicit time step.

#include <optional>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include "floatgrip/model.hpp"
#include "floatgrip/spatial.hpp"

namespace floatgrip {

/// Propulsion wrench on the base, expressed in the base frame and applied at
/// the base origin, active for t0 <= t < t1.
struct ThrusterCommand {
  Wrench wrench;
  double t0 = 0.0;
  double t1 = 0.0;

  bool active(double t) const { return t >= t0 && t < t1; }
};

struct MomentumRecord {
  Vec3 linear = Vec3::Zero();
  /// About the world origin.
  Vec3 angular = Vec3::Zero();
  double t = 0.0;
};

/// An impulse applied to the material point of `link` at world `point`.
struct AppliedImpulse {
  int link = 0;
  Vec3 point = Vec3::Zero();
  Vec3 impulse = Vec3::Zero();
};

Eigen::MatrixXd mass_matrix(const ModelDef& model, const State& state);

/// Kinetic energy summed link by link, 0.5 <V_i, I_i V_i>.
double kinetic_energy(const ModelDef& model, const State& state);

/// Velocity-product generalized forces C(q, v), including the effect of a
/// uniform gravity field (zero unless given).
Eigen::VectorXd bias_forces(const ModelDef& model, const State& state,
                            const Vec3& gravity = Vec3::Zero());

/// Total momentum from (model, state); angular momentum about the world origin.
MomentumRecord total_momentum(const ModelDef& model, const State& state);

/// Generalized force of a base-frame wrench applied at the base origin.
Eigen::VectorXd thrust_generalized_force(const ModelDef& model, const State& state,
                                         const Wrench& base_wrench);

/// Joint-space terms of one step.
struct StepForces {
  /// Generalized forces evaluated at the start of the step (actuators, user
  /// torques). Passive damping is added by the integrator.
  Eigen::VectorXd tau;
  /// Diagonal stiffness and damping of `tau` with respect to positions and
  /// velocities, integrated implicitly. Empty means zero.
  Eigen::VectorXd stiffness;
  Eigen::VectorXd damping;
};

/// Everything that is fixed before contact impulses are known: the effective
/// inertia M + dt D + dt^2 K, its factorization, and the impulse-free
/// velocity.
class StepSystem {
 public:
  StepSystem(const ModelDef& model, const State& state, const StepForces& forces,
             const std::optional<ThrusterCommand>& thrust, double dt,
             const Vec3& gravity = Vec3::Zero());

  const ModelDef& model() const { return *model_; }
  const State& state() const { return state_; }
  const std::vector<Pose>& poses() const { return poses_; }
  double dt() const { return dt_; }
  const Eigen::MatrixXd& effective_mass() const { return effective_mass_; }
  const Eigen::VectorXd& free_velocity() const { return free_velocity_; }

  /// Effective-mass inverse applied to `rhs` (columns).
  Eigen::MatrixXd solve(const Eigen::MatrixXd& rhs) const;

  /// Momentum after the step, given the impulses (thrust and gravity
  /// included).
  MomentumRecord momentum_target(const std::vector<AppliedImpulse>& impulses) const;

 private:
  const ModelDef* model_;
  State state_;
  std::vector<Pose> poses_;
  double dt_;
  Vec3 gravity_;
  Wrench world_thrust_;  // about the world origin
  Eigen::MatrixXd effective_mass_;
  Eigen::LLT<Eigen::MatrixXd> factor_;
  Eigen::VectorXd free_velocity_;
  MomentumRecord momentum_;
};

/// Completes a step: v+ = v_free + M_eff^-1 sum J^T p, positions advanced
/// with v+, joint limits enforced, then the base velocity is corrected so
/// that total momentum equals the start-of-step momentum plus the external
/// impulses. Bit-for-bit deterministic.
State finish_step(const StepSystem& system, const std::vector<AppliedImpulse>& impulses);

/// Convenience wrapper: one full step without contact detection.
State forward_dynamics(const ModelDef& model, const State& state, const StepForces& forces,
                       const std::vector<AppliedImpulse>& impulses,
                       const std::optional<ThrusterCommand>& thrust, double dt,
                       const Vec3& gravity = Vec3::Zero());

/// Per-link spatial velocities about the world origin.
std::vector<Vec6> link_velocities(const ModelDef& model, const std::vector<Pose>& poses,
                                  const Eigen::VectorXd& v);

/// Per-link spatial inertia matrices about the world origin.
std::vector<Mat6> world_inertias(const ModelDef& model, const std::vector<Pose>& poses);

}  // namespace floatgrip
