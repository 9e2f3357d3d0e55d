#pragma once

// Collision detection against world geometry and between gripper links, and
// the per-step velocity-level contact solve with Coulomb friction.

#include <array>
#include <map>
#include <vector>

#include <Eigen/Core>

#include "floatgrip/compliance.hpp"
#include "floatgrip/dynamics.hpp"
#include "floatgrip/model.hpp"
#include "floatgrip/spatial.hpp"

namespace floatgrip {

struct ContactPoint {
  Vec3 position = Vec3::Zero();
  /// Unit normal pointing from the other body toward `link`.
  Vec3 normal = Vec3::UnitZ();
  /// Penetration depth, > 0.
  double depth = 0.0;
  int link = 0;
  int geom = 0;
  /// -1 for world geometry.
  int other_link = -1;
  /// Index into the other link's geoms, or into ModelDef::static_geoms.
  int other_geom = 0;
  /// Combined material of the pair.
  Material material;
  /// Distinguishes several contacts of one geom pair (box-cylinder samples).
  int feature = 0;
};

/// Series stiffness, summed damping, geometric-mean friction.
Material combine_materials(const Material& a, const Material& b);

/// Contacts between link geoms and world geometry, and between sphere and
/// capsule geoms of links where neither is an ancestor of the other (box and
/// cylinder link geoms only collide with the world). Sorted by link, geom,
/// other link, other geom. At most one contact per geom pair, except
/// box-cylinder (up to 4). Throws ModelError for an unsupported pair.
std::vector<ContactPoint> detect_contacts(const ModelDef& model, const std::vector<Pose>& poses);

/// Orthonormal tangents for a unit normal: t1 = normalize(n x e) where e is the
/// coordinate axis of the smallest |n| component (first on ties), t2 = n x t1.
std::pair<Vec3, Vec3> tangent_basis(const Vec3& n);

/// Constraint-force-mixing coefficient along a unit direction:
/// d^T Cc d / dt (s/kg).
double contact_regularization(const ContactCompliance& cc, const Vec3& direction, double dt);

struct SolverConfig {
  int max_iterations = 50;
  /// Stop when no impulse component changes by more than this (N*s).
  double tolerance = 1e-8;
  double baumgarte = 0.2;
};

struct ContactImpulse {
  double normal = 0.0;
  Eigen::Vector2d tangent = Eigen::Vector2d::Zero();
  Vec3 n = Vec3::UnitZ();
  Vec3 t1 = Vec3::UnitX();
  Vec3 t2 = Vec3::UnitY();

  Vec3 world() const { return normal * n + tangent[0] * t1 + tangent[1] * t2; }
};

struct SolverDiagnostics {
  int iterations = 0;
  bool converged = true;
  /// Largest complementarity or stationarity violation after the solve.
  double residual = 0.0;
};

struct ContactSolution {
  std::vector<ContactImpulse> impulses;
  SolverDiagnostics diagnostics;
  /// Regularization used per contact (normal, t1, t2).
  std::vector<Vec3> regularization;
};

/// Friction memory between steps. A sticking contact is a tangential spring
/// of the material stiffness; its extension is recovered from the friction
/// force the contact carried on the previous step. Contacts are matched by
/// (link, geom, other link, other geom, feature).
class ContactHistory {
 public:
  /// Friction force (world frame, N) on the previous step; zero if new.
  Vec3 friction_force(const ContactPoint& contact) const;
  /// Replaces the memory with this step's active contacts.
  void update(const std::vector<ContactPoint>& contacts, const ContactSolution& solution,
              double dt);
  std::size_t size() const { return forces_.size(); }

 private:
  std::map<std::array<int, 5>, Vec3> forces_;
};

/// Relative-velocity Jacobian (3 x nv) of a contact: link point minus other
/// point, rows along (n, t1, t2).
Eigen::MatrixXd contact_jacobian(const ModelDef& model, const std::vector<Pose>& poses,
                                 const ContactPoint& contact);

/// Projected Gauss-Seidel over the contacts in order. The normal row is
/// softened by J_a Cq J_a^T over the actuated columns plus the material
/// compliance 1/k_n and solves
///   0 <= p_n  _|_  v_n+ - beta depth / dt + r_n p_n >= 0.
/// The tangent pair is an implicit spring of compliance c = 1/k_n,
///   v_t+ - c F_prev / dt + c / dt^2 p_t = 0,
/// where F_prev is the friction force from `history` (zero without one),
/// solved as a 2x2 block and projected onto the disk |p_t| <= mu p_n.
ContactSolution solve_contacts(const StepSystem& system, const std::vector<ContactPoint>& contacts,
                               const JointCompliance& cq, const SolverConfig& cfg = {},
                               const ContactHistory* history = nullptr);

/// Impulses as point impulses for finish_step (a pair for link-link contacts).
std::vector<AppliedImpulse> applied_impulses(const std::vector<ContactPoint>& contacts,
                                             const std::vector<ContactImpulse>& impulses);

}  // namespace floatgrip
