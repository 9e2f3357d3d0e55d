#pragma once

// Declarative scenario language: phases of thrust, joint and gripper
// commands, plus the built-in perch-and-maneuver scenarios.
//
//   scenario "name" {
//     model "astrobee-claw"        # builtin id or model-file path
//     timestep 0.001
//     gravity 0 0 0
//     seed 0
//     phase approach {
//       duration 5
//       thrust -0.1 0 0 0 0 0 ramp # fx fy fz tx ty tz, base frame
//       gripper open 0
//     }
//     phase tilt { duration 6 joint tilt trapezoid 0.5 0.25 }
//     log base_position joints contacts
//   }

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace floatgrip {

enum class ThrustMode { Hold, Ramp };

/// Base-frame wrench (fx, fy, fz, tx, ty, tz) at the base origin. Hold keeps
/// it constant over the phase; ramp grows linearly from zero to it.
struct ThrustDef {
  std::array<double, 6> wrench{};
  ThrustMode mode = ThrustMode::Hold;
  friend bool operator==(const ThrustDef&, const ThrustDef&) = default;
};

enum class ProfileKind { Step, Ramp, Trapezoid };

/// step(a): a for the whole phase. ramp(a, b): linear from a to b.
/// trapezoid(a, f): from the value held at phase start up by a over the first
/// fraction f of the phase, hold, and back down over the last fraction f.
struct Profile {
  ProfileKind kind = ProfileKind::Step;
  double a = 0.0;
  double b = 0.0;
  friend bool operator==(const Profile&, const Profile&) = default;
};

/// Drives an actuator channel: an uncoupled actuated joint or a coupling
/// group, by name.
struct JointCommandDef {
  std::string joint;
  Profile profile;
  friend bool operator==(const JointCommandDef&, const JointCommandDef&) = default;
};

enum class GripAction { Open, Close };

/// Moves every gripper channel to its open or close target, linearly over
/// `seconds` (0 = immediately).
struct GripperDef {
  GripAction action = GripAction::Open;
  double seconds = 0.0;
  friend bool operator==(const GripperDef&, const GripperDef&) = default;
};

using CommandDef = std::variant<ThrustDef, JointCommandDef, GripperDef>;

struct PhaseDef {
  std::string name;
  double duration = 0.0;
  std::vector<CommandDef> commands;
  friend bool operator==(const PhaseDef&, const PhaseDef&) = default;
};

struct ScenarioDef {
  std::string name;
  /// Builtin model id or model-file path; empty when bound by the caller.
  std::string model;
  double timestep = 1e-3;
  std::array<double, 3> gravity{};
  std::int64_t seed = 0;
  std::vector<PhaseDef> phases;
  std::vector<std::string> log;

  double total_duration() const;
  friend bool operator==(const ScenarioDef&, const ScenarioDef&) = default;
};

/// Log channels accepted by the `log` directive.
const std::vector<std::string>& log_channels();

/// Throws ParseError carrying line and column.
ScenarioDef parse_scenario(std::string_view text);

/// Canonical text; parse_scenario(serialize_scenario(s)) == s.
std::string serialize_scenario(const ScenarioDef& scenario);

/// Builtin ids of the two models.
inline constexpr std::string_view kClawModelId = "astrobee-claw";
inline constexpr std::string_view kDexCoHandModelId = "astrobee-dexcohand";

/// claw-tilt, claw-pan, dexcohand-tilt, dexcohand-pan.
std::vector<ScenarioDef> builtin_scenarios();

/// Builtin by name; throws std::out_of_range when unknown.
ScenarioDef builtin_scenario(std::string_view name);

}  // namespace floatgrip
