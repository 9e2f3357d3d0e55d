#include "floatgrip/contact.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <tuple>

#include <Eigen/LU>

#include "floatgrip/errors.hpp"

namespace floatgrip {

Material combine_materials(const Material& a, const Material& b) {
  Material m;
  m.name = a.name == b.name ? a.name : a.name + "+" + b.name;
  m.stiffness = a.stiffness * b.stiffness / (a.stiffness + b.stiffness);
  m.damping = a.damping + b.damping;
  m.friction = std::sqrt(a.friction * b.friction);
  return m;
}

std::pair<Vec3, Vec3> tangent_basis(const Vec3& n) {
  int axis = 0;
  for (int i = 1; i < 3; ++i) {
    if (std::abs(n[i]) < std::abs(n[axis])) axis = i;
  }
  const Vec3 t1 = n.cross(Vec3::Unit(axis)).normalized();
  return {t1, n.cross(t1)};
}

double contact_regularization(const ContactCompliance& cc, const Vec3& direction, double dt) {
  return std::max(0.0, direction.dot(cc.matrix * direction)) / dt;
}

namespace {

struct Segment {
  Vec3 a;
  Vec3 b;
};

Segment axis_segment(const GeomDef& g, const Pose& world) {
  const Pose p = compose(world, g.local_pose);
  const Vec3 h = p.apply_rotation(Vec3(0, 0, g.half_length()));
  return {p.translation - h, p.translation + h};
}

// Closest points between two segments as parameters in [0, 1]. For parallel
// segments the midpoint of the overlapping interval is used.
std::pair<double, double> closest_parameters(const Segment& s1, const Segment& s2) {
  const Vec3 d1 = s1.b - s1.a;
  const Vec3 d2 = s2.b - s2.a;
  const Vec3 r = s1.a - s2.a;
  const double a = d1.squaredNorm();
  const double e = d2.squaredNorm();
  const double f = d2.dot(r);
  constexpr double eps = 1e-14;
  if (a <= eps && e <= eps) return {0.0, 0.0};
  if (a <= eps) return {0.0, std::clamp(f / e, 0.0, 1.0)};
  const double c = d1.dot(r);
  if (e <= eps) return {std::clamp(-c / a, 0.0, 1.0), 0.0};
  const double b = d1.dot(d2);
  const double denom = a * e - b * b;
  if (denom <= 1e-12 * a * e) {
    // Project segment 2 onto segment 1 and take the middle of the overlap.
    const double u0 = std::clamp(-c / a, 0.0, 1.0);
    const double u1 = std::clamp((b - c) / a, 0.0, 1.0);
    const double s = 0.5 * (u0 + u1);
    const double t = std::clamp((b * s + f) / e, 0.0, 1.0);
    return {s, t};
  }
  double s = std::clamp((b * f - c * e) / denom, 0.0, 1.0);
  double t = (b * s + f) / e;
  if (t < 0.0) {
    t = 0.0;
    s = std::clamp(-c / a, 0.0, 1.0);
  } else if (t > 1.0) {
    t = 1.0;
    s = std::clamp((b - c) / a, 0.0, 1.0);
  }
  return {s, t};
}

Vec3 lerp(const Segment& s, double u) { return s.a + u * (s.b - s.a); }

struct Hit {
  Vec3 position;
  Vec3 normal;  // toward the first shape
  double depth;
  int feature = 0;
};

// Sphere of radius r at c against sphere radius r2 at c2.
std::optional<Hit> sphere_sphere(const Vec3& c, double r, const Vec3& c2, double r2,
                                 const Vec3& fallback) {
  const Vec3 d = c - c2;
  const double dist = d.norm();
  const double depth = r + r2 - dist;
  if (!(depth > 0.0)) return std::nullopt;
  const Vec3 n = dist > 1e-12 ? Vec3(d / dist) : fallback;
  const Vec3 on_first = c - r * n;
  const Vec3 on_second = c2 + r2 * n;
  return Hit{0.5 * (on_first + on_second), n, depth};
}

// Sphere against a solid finite cylinder (axis along local z of `cyl`).
std::optional<Hit> sphere_cylinder(const Vec3& center, double r, const Pose& cyl, double radius,
                                   double half_length) {
  const Vec3 local = invert(cyl).apply(center);
  const double rho = std::hypot(local.x(), local.y());
  const Vec3 radial = rho > 1e-12 ? Vec3(local.x() / rho, local.y() / rho, 0.0) : Vec3::UnitX();
  Vec3 surface;
  Vec3 n_local;
  double dist;
  if (std::abs(local.z()) <= half_length && rho <= radius) {
    // Center inside the solid: leave through the nearest face.
    const double to_side = radius - rho;
    const double to_cap = half_length - std::abs(local.z());
    if (to_side <= to_cap) {
      n_local = radial;
      surface = Vec3(radius * radial.x(), radius * radial.y(), local.z());
    } else {
      n_local = Vec3(0, 0, local.z() >= 0.0 ? 1.0 : -1.0);
      surface = Vec3(local.x(), local.y(), std::copysign(half_length, n_local.z()));
    }
    dist = -std::min(to_side, to_cap);
  } else {
    const double z = std::clamp(local.z(), -half_length, half_length);
    const double rr = std::min(rho, radius);
    surface = Vec3(rr * radial.x(), rr * radial.y(), z);
    const Vec3 d = local - surface;
    dist = d.norm();
    n_local = dist > 1e-12 ? Vec3(d / dist) : radial;
  }
  const double depth = r - dist;
  if (!(depth > 0.0)) return std::nullopt;
  const Vec3 n = cyl.apply_rotation(n_local);
  const Vec3 on_surface = cyl.apply(surface);
  const Vec3 deepest = center - r * n;
  return Hit{0.5 * (on_surface + deepest), n, depth};
}

// Sphere against a box; normal from the box toward the sphere.
std::optional<Hit> sphere_box(const Vec3& center, double r, const Pose& box, const Vec3& half) {
  const Vec3 local = invert(box).apply(center);
  const Vec3 clamped = local.cwiseMax(-half).cwiseMin(half);
  Vec3 n_local;
  double dist;
  Vec3 surface = clamped;
  if (clamped == local) {
    int axis = 0;
    double best = std::numeric_limits<double>::infinity();
    for (int i = 0; i < 3; ++i) {
      const double gap = half[i] - std::abs(local[i]);
      if (gap < best) {
        best = gap;
        axis = i;
      }
    }
    n_local = Vec3::Zero();
    n_local[axis] = local[axis] >= 0.0 ? 1.0 : -1.0;
    surface[axis] = n_local[axis] * half[axis];
    dist = -best;
  } else {
    const Vec3 d = local - clamped;
    dist = d.norm();
    n_local = d / dist;
  }
  const double depth = r - dist;
  if (!(depth > 0.0)) return std::nullopt;
  const Vec3 n = box.apply_rotation(n_local);
  return Hit{0.5 * (box.apply(surface) + center - r * n), n, depth};
}

bool is_round(Shape s) { return s == Shape::Sphere || s == Shape::Capsule; }

Segment core_segment(const GeomDef& g, const Pose& world) {
  if (g.shape == Shape::Sphere) {
    const Vec3 c = compose(world, g.local_pose).translation;
    return {c, c};
  }
  return axis_segment(g, world);
}

std::string pair_name(const GeomDef& a, const GeomDef& b) {
  return std::string(to_string(a.shape)) + "-" + std::string(to_string(b.shape));
}

// Link geom (first) against a world geom (second); normal toward the link.
std::vector<Hit> against_world(const GeomDef& g, const Pose& link_pose, const GeomDef& w) {
  std::vector<Hit> hits;
  const Pose wp = w.local_pose;
  if (w.shape == Shape::Cylinder && is_round(g.shape)) {
    const Segment core = core_segment(g, link_pose);
    const Segment axis = axis_segment(w, Pose::identity());
    const double s = closest_parameters(core, axis).first;
    if (auto h = sphere_cylinder(lerp(core, s), g.radius(), wp, w.radius(), w.half_length())) {
      hits.push_back(*h);
    }
    return hits;
  }
  if (w.shape == Shape::Cylinder && g.shape == Shape::Box) {
    // Sample the cylinder axis; each sample is a sphere of the cylinder radius.
    const Pose box = compose(link_pose, g.local_pose);
    const Segment axis = axis_segment(w, Pose::identity());
    constexpr int kSamples = 33;
    std::vector<Hit> all;
    for (int i = 0; i < kSamples; ++i) {
      const Vec3 c = lerp(axis, static_cast<double>(i) / (kSamples - 1));
      if (auto h = sphere_box(c, w.radius(), box, g.half_extents())) {
        all.push_back(Hit{h->position, -h->normal, h->depth, i});
      }
    }
    if (all.size() <= 4) return all;
    const std::size_t last = all.size() - 1;
    for (std::size_t k = 0; k < 4; ++k) hits.push_back(all[(k * last) / 3]);
    return hits;
  }
  if (w.shape == Shape::Sphere && is_round(g.shape)) {
    const Segment core = core_segment(g, link_pose);
    const Vec3 c = wp.translation;
    const Vec3 p = lerp(core, closest_parameters(core, {c, c}).first);
    if (auto h = sphere_sphere(p, g.radius(), c, w.radius(), Vec3::UnitZ())) hits.push_back(*h);
    return hits;
  }
  if (w.shape == Shape::Box && g.shape == Shape::Sphere) {
    const Vec3 c = compose(link_pose, g.local_pose).translation;
    if (auto h = sphere_box(c, g.radius(), wp, w.half_extents())) hits.push_back(*h);
    return hits;
  }
  throw ModelError("unsupported contact pair " + pair_name(g, w));
}

}  // namespace

std::vector<ContactPoint> detect_contacts(const ModelDef& model, const std::vector<Pose>& poses) {
  std::vector<ContactPoint> out;
  const int n = static_cast<int>(model.links.size());
  const Material fallback;
  const auto material_of = [&](const GeomDef& g) {
    const Material* m = model.find_material(g.material);
    return m ? *m : fallback;
  };
  for (int li = 0; li < n; ++li) {
    const LinkDef& link = model.links[li];
    for (int gi = 0; gi < static_cast<int>(link.geoms.size()); ++gi) {
      const GeomDef& g = link.geoms[gi];
      for (int lj = li + 1; lj < n; ++lj) {
        if (!is_round(g.shape)) break;
        if (model.is_ancestor(li, lj) || model.is_ancestor(lj, li)) continue;
        const LinkDef& other = model.links[lj];
        for (int gj = 0; gj < static_cast<int>(other.geoms.size()); ++gj) {
          const GeomDef& h = other.geoms[gj];
          if (!is_round(h.shape)) continue;
          const Segment a = core_segment(g, poses[li]);
          const Segment b = core_segment(h, poses[lj]);
          const auto [s, t] = closest_parameters(a, b);
          const Vec3 fallback_normal = (poses[li].translation - poses[lj].translation).normalized();
          if (auto hit = sphere_sphere(lerp(a, s), g.radius(), lerp(b, t), h.radius(),
                                       fallback_normal.allFinite() ? fallback_normal : Vec3::UnitZ())) {
            out.push_back({hit->position, hit->normal, hit->depth, li, gi, lj, gj,
                           combine_materials(material_of(g), material_of(h))});
          }
        }
      }
      for (int wi = 0; wi < static_cast<int>(model.static_geoms.size()); ++wi) {
        const GeomDef& w = model.static_geoms[wi];
        for (const Hit& hit : against_world(g, poses[li], w)) {
          out.push_back({hit.position, hit.normal, hit.depth, li, gi, -1, wi,
                         combine_materials(material_of(g), material_of(w)), hit.feature});
        }
      }
    }
  }
  // Order: link, geom, then world contacts before link pairs, then other geom.
  std::stable_sort(out.begin(), out.end(), [](const ContactPoint& a, const ContactPoint& b) {
    if (a.link != b.link) return a.link < b.link;
    if (a.geom != b.geom) return a.geom < b.geom;
    if (a.other_link != b.other_link) return a.other_link < b.other_link;
    if (a.other_geom != b.other_geom) return a.other_geom < b.other_geom;
    return a.feature < b.feature;
  });
  return out;
}

namespace {

std::array<int, 5> history_key(const ContactPoint& c) {
  return {c.link, c.geom, c.other_link, c.other_geom, c.feature};
}

}  // namespace

Vec3 ContactHistory::friction_force(const ContactPoint& c) const {
  const auto it = forces_.find(history_key(c));
  return it == forces_.end() ? Vec3::Zero() : it->second;
}

void ContactHistory::update(const std::vector<ContactPoint>& contacts,
                            const ContactSolution& solution, double dt) {
  forces_.clear();
  for (std::size_t i = 0; i < contacts.size() && i < solution.impulses.size(); ++i) {
    const ContactImpulse& p = solution.impulses[i];
    if (!(p.normal > 0.0)) continue;
    forces_[history_key(contacts[i])] = (p.tangent[0] * p.t1 + p.tangent[1] * p.t2) / dt;
  }
}

Eigen::MatrixXd contact_jacobian(const ModelDef& model, const std::vector<Pose>& poses,
                                 const ContactPoint& c) {
  Eigen::MatrixXd j = point_jacobian(model, poses, c.link, c.position);
  if (c.other_link >= 0) j -= point_jacobian(model, poses, c.other_link, c.position);
  return j;
}

ContactSolution solve_contacts(const StepSystem& system, const std::vector<ContactPoint>& contacts,
                               const JointCompliance& cq, const SolverConfig& cfg,
                               const ContactHistory* history) {
  ContactSolution sol;
  const std::size_t m = contacts.size();
  if (m == 0) return sol;
  const ModelDef& model = system.model();
  const double dt = system.dt();
  const int nv = model.nv;

  Eigen::MatrixXd jac(3 * m, nv);
  sol.impulses.resize(m);
  sol.regularization.resize(m);
  std::vector<Vec3> bias(m);
  for (std::size_t i = 0; i < m; ++i) {
    const ContactPoint& c = contacts[i];
    const Eigen::MatrixXd world = contact_jacobian(model, system.poses(), c);
    ContactImpulse& ci = sol.impulses[i];
    ci.n = c.normal;
    std::tie(ci.t1, ci.t2) = tangent_basis(c.normal);
    jac.row(3 * i) = ci.n.transpose() * world;
    jac.row(3 * i + 1) = ci.t1.transpose() * world;
    jac.row(3 * i + 2) = ci.t2.transpose() * world;

    // Joint compliance softens the normal row only. The friction rows are an
    // implicit spring of the material stiffness whose extension is carried
    // over as last step's friction force, so sticking contacts hold steady
    // loads without creeping.
    ContactCompliance joint = cq.columns.empty() ? ContactCompliance{} : contact_compliance(world, cq);
    const double compliance = 1.0 / c.material.stiffness;
    // Implicit spring-damper: F = F_prev - (k dt + c) v_t.
    const double admittance = 1.0 / (c.material.stiffness * dt + c.material.damping);
    const double spring = admittance / dt;
    sol.regularization[i] =
        Vec3(contact_regularization(joint, ci.n, dt) + compliance / dt, spring, spring);
    const Vec3 carried = history ? history->friction_force(c) : Vec3::Zero();
    bias[i] = Vec3(-cfg.baumgarte * c.depth / dt, -admittance * carried.dot(ci.t1),
                   -admittance * carried.dot(ci.t2));
  }

  const Eigen::MatrixXd minv_jt = system.solve(jac.transpose());
  const Eigen::MatrixXd w = jac * minv_jt;
  const Eigen::VectorXd u_free = jac * system.free_velocity();
  Eigen::VectorXd p = Eigen::VectorXd::Zero(3 * m);

  // Velocity residual of row k for the current impulses.
  const auto row_velocity = [&](Eigen::Index k) { return u_free[k] + w.row(k).dot(p); };

  int iter = 0;
  bool converged = false;
  while (iter < cfg.max_iterations) {
    ++iter;
    double change = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      const Eigen::Index k = static_cast<Eigen::Index>(3 * i);
      const Vec3& r = sol.regularization[i];
      const double mu = contacts[i].material.friction;

      const double un = row_velocity(k) + bias[i][0] + r[0] * p[k];
      const double pn = std::max(0.0, p[k] - un / (w(k, k) + r[0]));
      change = std::max(change, std::abs(pn - p[k]));
      p[k] = pn;

      Eigen::Vector2d ut(row_velocity(k + 1) + bias[i][1] + r[1] * p[k + 1],
                         row_velocity(k + 2) + bias[i][2] + r[2] * p[k + 2]);
      Eigen::Matrix2d block = w.block<2, 2>(k + 1, k + 1);
      block(0, 0) += r[1];
      block(1, 1) += r[2];
      Eigen::Vector2d pt = p.segment<2>(k + 1) - block.partialPivLu().solve(ut);
      const double limit = mu * pn;
      const double norm = pt.norm();
      if (norm > limit) pt *= norm > 0.0 ? limit / norm : 0.0;
      change = std::max(change, (pt - p.segment<2>(k + 1)).cwiseAbs().maxCoeff());
      p.segment<2>(k + 1) = pt;
    }
    if (change <= cfg.tolerance) {
      converged = true;
      break;
    }
  }

  double residual = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const Eigen::Index k = static_cast<Eigen::Index>(3 * i);
    const double un = row_velocity(k) + bias[i][0] + sol.regularization[i][0] * p[k];
    // Complementarity when pushing, feasibility when not.
    residual += p[k] > 0.0 ? std::abs(p[k] * un) : std::max(0.0, -un);
    ContactImpulse& ci = sol.impulses[i];
    ci.normal = p[k];
    ci.tangent = p.segment<2>(k + 1);
  }
  sol.diagnostics = {iter, converged, residual};
  return sol;
}

std::vector<AppliedImpulse> applied_impulses(const std::vector<ContactPoint>& contacts,
                                             const std::vector<ContactImpulse>& impulses) {
  std::vector<AppliedImpulse> out;
  for (std::size_t i = 0; i < contacts.size(); ++i) {
    const Vec3 p = impulses[i].world();
    out.push_back({contacts[i].link, contacts[i].position, p});
    if (contacts[i].other_link >= 0) out.push_back({contacts[i].other_link, contacts[i].position, -p});
  }
  return out;
}

}  // namespace floatgrip
