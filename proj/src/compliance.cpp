#include "floatgrip/compliance.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <Eigen/Eigenvalues>

namespace floatgrip {

JointCompliance joint_compliance(const ModelDef& model) {
  JointCompliance cq;
  const auto links = model.actuated_links();
  const int n = static_cast<int>(links.size());
  cq.matrix = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    const LinkDef& link = model.links[links[i]];
    cq.matrix(i, i) = 1.0 / link.joint.stiffness;
    cq.columns.push_back(link.v_offset);
  }
  return cq;
}

ContactCompliance contact_compliance(const Eigen::MatrixXd& jacobian, const JointCompliance& cq) {
  const auto n = static_cast<Eigen::Index>(cq.columns.size());
  if (jacobian.rows() != 3) throw std::invalid_argument("contact Jacobian must have 3 rows");
  if (cq.matrix.rows() != n || cq.matrix.cols() != n) {
    throw std::invalid_argument("compliance matrix does not match its column map");
  }
  Eigen::MatrixXd ja(3, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const int c = cq.columns[i];
    if (c < 0 || c >= jacobian.cols()) throw std::invalid_argument("column map out of range");
    ja.col(i) = jacobian.col(c);
  }
  ContactCompliance out;
  out.matrix = ja * cq.matrix * ja.transpose();
  out.matrix = 0.5 * (out.matrix + out.matrix.transpose()).eval();
  return out;
}

bool is_symmetric_psd(const Eigen::MatrixXd& m) {
  if (m.rows() != m.cols()) return false;
  if (m.size() == 0) return true;
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-12) return false;
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff() >= -1e-10;
}

namespace {

constexpr double kJacobiTolerance = 1e-12;

}  // namespace

SymmetricEigen3 jacobi_eigen(const Mat3& input) {
  Mat3 a = 0.5 * (input + input.transpose());
  Mat3 v = Mat3::Identity();
  const double scale = std::max(a.cwiseAbs().maxCoeff(), 1e-300);
  for (int sweep = 0; sweep < 64; ++sweep) {
    const double off = std::abs(a(0, 1)) + std::abs(a(0, 2)) + std::abs(a(1, 2));
    if (off <= kJacobiTolerance * scale) break;
    for (int p = 0; p < 2; ++p) {
      for (int q = p + 1; q < 3; ++q) {
        if (a(p, q) == 0.0) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * a(p, q));
        const double t = std::copysign(1.0, theta) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        Mat3 r = Mat3::Identity();
        r(p, p) = c;
        r(q, q) = c;
        r(p, q) = s;
        r(q, p) = -s;
        a = r.transpose() * a * r;
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        v = v * r;
      }
    }
  }
  std::array<int, 3> order{0, 1, 2};
  std::stable_sort(order.begin(), order.end(), [&](int i, int j) { return a(i, i) > a(j, j); });
  SymmetricEigen3 out;
  for (int i = 0; i < 3; ++i) {
    out.values[i] = a(order[i], order[i]);
    out.vectors.col(i) = v.col(order[i]);
  }
  return out;
}

ComplianceEllipsoid compliance_ellipsoid(const ContactCompliance& cc) {
  const SymmetricEigen3 e = jacobi_eigen(cc.matrix);
  ComplianceEllipsoid out;
  for (int i = 0; i < 3; ++i) {
    out.axes[i] = e.vectors.col(i);
    out.radii[i] = std::max(0.0, e.values[i]);
  }
  return out;
}

int ActuatorSet::find(const std::string& name) const {
  for (std::size_t i = 0; i < channels.size(); ++i) {
    if (channels[i].name == name) return static_cast<int>(i);
  }
  return -1;
}

ActuatorSet actuator_set(const ModelDef& model) {
  ActuatorSet set;
  for (int index : model.actuated_links()) {
    const LinkDef& link = model.links[index];
    const JointDef& j = link.joint;
    ActuatedJoint a{index, link.q_offset, link.v_offset, 1.0, j.stiffness, j.actuator_damping,
                    j.torque_limit};
    std::string channel = link.name;
    if (j.coupling) {
      channel = j.coupling->group;
      a.ratio = j.coupling->ratio;
    }
    const int existing = j.coupling ? set.find(channel) : -1;
    if (existing >= 0) {
      set.channels[existing].joints.push_back(a);
    } else {
      set.channels.push_back({channel, {a}});
    }
  }
  return set;
}

ActuatorOutput evaluate_actuators(const ActuatorSet& set, int nv, const State& state,
                                  const std::vector<double>& commands) {
  if (commands.size() != set.channels.size()) {
    throw std::invalid_argument("command count does not match actuator count");
  }
  ActuatorOutput out{Eigen::VectorXd::Zero(nv), Eigen::VectorXd::Zero(nv),
                     Eigen::VectorXd::Zero(nv)};
  for (std::size_t c = 0; c < set.channels.size(); ++c) {
    for (const ActuatedJoint& a : set.channels[c].joints) {
      const double target = a.ratio * commands[c];
      const double raw =
          a.stiffness * (target - state.q[a.q_index]) - a.damping * state.v[a.v_index];
      if (std::abs(raw) > a.torque_limit) {
        out.tau[a.v_index] = std::copysign(a.torque_limit, raw);
      } else {
        out.tau[a.v_index] = raw;
        out.stiffness[a.v_index] = a.stiffness;
        out.damping[a.v_index] = a.damping;
      }
    }
  }
  return out;
}

}  // namespace floatgrip
