#include "floatgrip/simrun.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <variant>

#include "floatgrip/astrobee.hpp"
#include "floatgrip/dynamics.hpp"
#include "floatgrip/errors.hpp"
#include "floatgrip/model_io.hpp"
#include "floatgrip/text.hpp"

namespace floatgrip {
namespace {

double trapezoid_shape(double u, double rise) {
  if (u < rise) return u / rise;
  if (u > 1.0 - rise) return (1.0 - u) / rise;
  return 1.0;
}

// Command target of a gripper channel, in channel units.
std::optional<double> grip_target(const ModelDef& model, const ActuatorChannel& ch,
                                  GripAction action) {
  for (const auto& j : ch.joints) {
    if (!model.links[j.link].joint.grip) return std::nullopt;
  }
  const ActuatedJoint& lead = ch.joints.front();
  const GripTargets& g = *model.links[lead.link].joint.grip;
  return (action == GripAction::Open ? g.open : g.close) / lead.ratio;
}

std::string describe_unbindable(const ModelDef& model, const std::string& name) {
  const int link = model.link_index(name);
  if (link < 0) return "no actuator channel named '" + name + "'";
  const JointDef& j = model.links[link].joint;
  if (!j.actuated) return "joint '" + name + "' is not actuated";
  return "joint '" + name + "' is driven by coupling group '" + j.coupling->group + "'";
}

}  // namespace

double CommandSegment::value(long k, double dt) const {
  const double tau = static_cast<double>(k - start) * dt;
  const double u = duration > 0.0 ? std::clamp(tau / duration, 0.0, 1.0) : 1.0;
  switch (kind) {
    case Kind::Hold: return from;
    case Kind::Step: return a;
    case Kind::Ramp: return a + (b - a) * u;
    case Kind::Trapezoid: return from + a * trapezoid_shape(u, b);
    case Kind::Move: {
      if (!(b > 0.0)) return a;
      const double w = std::min(tau / b, 1.0);
      return from + (a - from) * w;
    }
  }
  return from;
}

double CommandSegment::end_value() const {
  switch (kind) {
    case Kind::Hold: return from;
    case Kind::Step: return a;
    case Kind::Ramp: return b;
    case Kind::Trapezoid: return from;
    case Kind::Move:
      if (!(b > duration)) return a;
      return from + (a - from) * (duration / b);
  }
  return from;
}

BoundScenario::BoundScenario(const ScenarioDef& scenario, const ModelDef& model)
    : scenario_(scenario), actuators_(actuator_set(model)) {
  if (!(scenario.timestep > 0.0)) throw BindError("timestep must be positive");
  const double dt = scenario.timestep;
  double elapsed = 0.0;
  long start = 0;
  for (const auto& ph : scenario.phases) {
    elapsed += ph.duration;
    const long end = std::lround(elapsed / dt);
    if (end <= start) {
      throw BindError("phase '" + ph.name + "' is shorter than one timestep");
    }
    phases_.push_back({ph.name, start, end});
    start = end;
  }

  const State init = initial_state(model);
  const size_t nch = actuators_.channels.size();
  channel_segments_.resize(nch);
  for (const auto& ch : actuators_.channels) {
    const ActuatedJoint& lead = ch.joints.front();
    initial_commands_.push_back(init.q[lead.q_index] / lead.ratio);
  }

  std::vector<double> carry = initial_commands_;
  for (size_t p = 0; p < scenario.phases.size(); ++p) {
    const PhaseDef& ph = scenario.phases[p];
    const PhaseWindow& w = phases_[p];
    std::vector<std::optional<CommandSegment>> set(nch);
    std::optional<ThrustSegment> thrust;
    auto claim = [&](size_t c) -> CommandSegment& {
      if (set[c]) {
        throw BindError("phase '" + ph.name + "' commands channel '" +
                        actuators_.channels[c].name + "' more than once");
      }
      set[c] = CommandSegment{};
      set[c]->start = w.start;
      set[c]->end = w.end;
      set[c]->duration = ph.duration;
      set[c]->from = carry[c];
      return *set[c];
    };
    for (const auto& cmd : ph.commands) {
      if (const auto* t = std::get_if<ThrustDef>(&cmd)) {
        if (thrust) throw BindError("phase '" + ph.name + "' has more than one thrust command");
        thrust = ThrustSegment{};
        thrust->start = w.start;
        thrust->end = w.end;
        thrust->duration = ph.duration;
        Vec6 wrench;
        wrench << t->wrench[3], t->wrench[4], t->wrench[5], t->wrench[0], t->wrench[1],
            t->wrench[2];
        (t->mode == ThrustMode::Hold ? thrust->hold : thrust->ramp) = wrench;
      } else if (const auto* j = std::get_if<JointCommandDef>(&cmd)) {
        const int c = actuators_.find(j->joint);
        if (c < 0) {
          throw BindError("phase '" + ph.name + "': " + describe_unbindable(model, j->joint));
        }
        CommandSegment& seg = claim(static_cast<size_t>(c));
        seg.a = j->profile.a;
        seg.b = j->profile.b;
        switch (j->profile.kind) {
          case ProfileKind::Step: seg.kind = CommandSegment::Kind::Step; break;
          case ProfileKind::Ramp: seg.kind = CommandSegment::Kind::Ramp; break;
          case ProfileKind::Trapezoid: seg.kind = CommandSegment::Kind::Trapezoid; break;
        }
      } else {
        const auto& g = std::get<GripperDef>(cmd);
        bool any = false;
        for (size_t c = 0; c < nch; ++c) {
          const auto target = grip_target(model, actuators_.channels[c], g.action);
          if (!target) continue;
          any = true;
          CommandSegment& seg = claim(c);
          seg.kind = CommandSegment::Kind::Move;
          seg.a = *target;
          seg.b = g.seconds;
        }
        if (!any) throw BindError("phase '" + ph.name + "': model has no gripper joints");
      }
    }
    for (size_t c = 0; c < nch; ++c) {
      if (!set[c]) {
        set[c] = CommandSegment{};
        set[c]->start = w.start;
        set[c]->end = w.end;
        set[c]->duration = ph.duration;
        set[c]->from = carry[c];
      }
      carry[c] = set[c]->end_value();
      channel_segments_[c].push_back(*set[c]);
    }
    if (thrust) thrust_segments_.push_back(*thrust);
  }
}

std::vector<double> BoundScenario::commands(long k) const {
  std::vector<double> out(channel_segments_.size());
  for (size_t c = 0; c < channel_segments_.size(); ++c) {
    const auto& segs = channel_segments_[c];
    if (segs.empty()) {
      out[c] = initial_commands_[c];
      continue;
    }
    if (k >= segs.back().end) {
      out[c] = segs.back().end_value();
      continue;
    }
    const auto it = std::upper_bound(segs.begin(), segs.end(), k,
                                     [](long x, const CommandSegment& s) { return x < s.end; });
    out[c] = it->value(k, scenario_.timestep);
  }
  return out;
}

Wrench BoundScenario::thrust(long k) const {
  for (const auto& s : thrust_segments_) {
    if (k < s.start || k >= s.end) continue;
    const double u = static_cast<double>(k - s.start) * scenario_.timestep / s.duration;
    return Wrench::from_vector(s.hold + s.ramp * std::min(u, 1.0));
  }
  return {};
}

ModelDef resolve_model(const ScenarioDef& scenario) {
  if (scenario.model.empty()) throw BindError("scenario does not name a model");
  if (is_builtin_model(scenario.model)) return builtin_model(scenario.model);
  std::ifstream in(scenario.model);
  if (!in) {
    throw BindError("model '" + scenario.model + "' is neither a builtin nor a readable file");
  }
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_model(ss.str());
}

namespace {

struct ManeuverInfo {
  std::string joint;
  double peak = 0.0;
};

// The last phase's single trapezoid joint command, if any.
std::optional<ManeuverInfo> maneuver_info(const ScenarioDef& s) {
  if (s.phases.empty()) return std::nullopt;
  std::optional<ManeuverInfo> out;
  for (const auto& c : s.phases.back().commands) {
    const auto* j = std::get_if<JointCommandDef>(&c);
    if (!j || j->profile.kind != ProfileKind::Trapezoid) continue;
    if (out) return std::nullopt;
    out = ManeuverInfo{j->joint, j->profile.a};
  }
  return out;
}

bool logs(const ScenarioDef& s, const std::string& channel) {
  return std::find(s.log.begin(), s.log.end(), channel) != s.log.end();
}

}  // namespace

TrajectoryLog run_scenario(const ScenarioDef& scenario, const ModelDef& model,
                           const RunOptions& options, RunStats* stats) {
  const BoundScenario bound(scenario, model);
  const double dt = scenario.timestep;
  const Vec3 gravity(scenario.gravity[0], scenario.gravity[1], scenario.gravity[2]);
  const JointCompliance cq = joint_compliance(model);
  const int nv = model.nv;

  if (model.links.empty() || model.links.front().joint.kind != JointKind::Free) {
    throw BindError("model root must be a free joint");
  }

  TrajectoryLog log;
  log.meta.emplace_back("scenario", scenario.name);
  log.meta.emplace_back("model", scenario.model);
  log.meta.emplace_back("timestep", format_double(dt));
  log.meta.emplace_back("seed", std::to_string(scenario.seed));
  log.meta.emplace_back("engine_version", std::string(kEngineVersion));
  std::string windows;
  for (const auto& w : bound.phases()) {
    if (!windows.empty()) windows += ';';
    windows += w.name + ":" + std::to_string(w.start) + ":" + std::to_string(w.end);
  }
  log.meta.emplace_back("phases", windows);
  if (const auto m = maneuver_info(scenario)) {
    log.meta.emplace_back("maneuver", scenario.phases.back().name);
    log.meta.emplace_back("maneuver_joint", m->joint);
    log.meta.emplace_back("maneuver_peak", format_double(m->peak));
  }

  log.columns = {"t", "px", "py", "pz", "qw", "qx", "qy", "qz"};
  std::vector<int> joint_q;
  for (const auto& l : model.links) {
    if (l.joint.kind == JointKind::Revolute || l.joint.kind == JointKind::Prismatic) {
      log.columns.push_back("q_joint_" + l.name);
      joint_q.push_back(l.q_offset);
    }
  }
  log.columns.push_back("fn_total");
  const bool log_contacts = logs(scenario, "contacts");
  const bool log_momentum = logs(scenario, "momentum");
  if (log_contacts) {
    log.columns.push_back("n_contacts");
    log.columns.push_back("impulse_sum");
  }
  if (log_momentum) {
    for (const char* c : {"hx", "hy", "hz", "lx", "ly", "lz"}) log.columns.emplace_back(c);
  }
  if (options.diagnostics) {
    log.columns.push_back("diag_iters");
    log.columns.push_back("diag_residual");
  }

  State state = initial_state(model);
  ContactHistory history;
  RunStats local;
  const long n = bound.step_count();
  log.rows.reserve(static_cast<size_t>(n + 1));

  auto record = [&](const State& s, double fn, int active, double impulse_sum,
                    const SolverDiagnostics& diag) {
    std::vector<double> row;
    row.reserve(log.columns.size());
    row.push_back(s.t);
    for (int i = 0; i < 7; ++i) row.push_back(s.q[i]);
    for (int qi : joint_q) row.push_back(s.q[qi]);
    row.push_back(fn);
    if (log_contacts) {
      row.push_back(active);
      row.push_back(impulse_sum);
    }
    if (log_momentum) {
      const MomentumRecord h = total_momentum(model, s);
      for (int i = 0; i < 3; ++i) row.push_back(h.linear[i]);
      for (int i = 0; i < 3; ++i) row.push_back(h.angular[i]);
    }
    if (options.diagnostics) {
      row.push_back(diag.iterations);
      row.push_back(diag.residual);
    }
    log.rows.push_back(std::move(row));
  };

  record(state, 0.0, 0, 0.0, SolverDiagnostics{0, true, 0.0});
  for (long k = 0; k < n; ++k) {
    try {
      const ActuatorOutput act = evaluate_actuators(bound.actuators(), nv, state, bound.commands(k));
      const StepForces forces{act.tau, act.stiffness, act.damping};
      const Wrench w = bound.thrust(k);
      std::optional<ThrusterCommand> thrust;
      if (!w.to_vector().isZero(0.0)) thrust = ThrusterCommand{w, state.t, state.t + dt};

      const StepSystem system(model, state, forces, thrust, dt, gravity);
      const auto contacts = detect_contacts(model, system.poses());
      const ContactSolution sol = solve_contacts(system, contacts, cq, options.solver, &history);
      history.update(contacts, sol, dt);
      const auto impulses = applied_impulses(contacts, sol.impulses);
      const MomentumRecord target = system.momentum_target(impulses);
      state = finish_step(system, impulses);
      state.t = static_cast<double>(k + 1) * dt;

      const MomentumRecord after = total_momentum(model, state);
      local.momentum_residual =
          std::max(local.momentum_residual, (after.linear - target.linear).norm());

      double fn = 0.0;
      double sum = 0.0;
      int active = 0;
      for (const auto& p : sol.impulses) {
        fn += p.normal;
        sum += p.world().norm();
        if (p.normal > 0.0) ++active;
      }
      local.peak_step_impulse = std::max(local.peak_step_impulse, sum);
      record(state, fn / dt, active, sum, sol.diagnostics);
    } catch (const NumericalError& e) {
      throw NumericalError(e.what(), k);
    }
  }
  local.steps = n;
  if (stats) *stats = local;
  return log;
}

}  // namespace floatgrip
