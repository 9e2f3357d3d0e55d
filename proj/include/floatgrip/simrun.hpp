#pragma once

// Binding a scenario to a model and running it: fixed-step loop of forward
// kinematics, contact detection, actuator evaluation, contact solve and
// integration, logged one row per step.

#include <optional>
#include <string>
#include <vector>

#include "floatgrip/compliance.hpp"
#include "floatgrip/contact.hpp"
#include "floatgrip/model.hpp"
#include "floatgrip/scenario.hpp"
#include "floatgrip/spatial.hpp"
#include "floatgrip/trajectory.hpp"

namespace floatgrip {

/// Phase window in steps: [start, end).
struct PhaseWindow {
  std::string name;
  long start = 0;
  long end = 0;
};

/// One piece of a channel's command history, covering one phase.
struct CommandSegment {
  enum class Kind { Hold, Step, Ramp, Trapezoid, Move };
  Kind kind = Kind::Hold;
  long start = 0;
  long end = 0;
  /// Phase duration, s.
  double duration = 0.0;
  /// Value carried in from the previous phase.
  double from = 0.0;
  /// Step: a. Ramp: a to b. Trapezoid: amplitude a, rise fraction b. Move:
  /// from `from` to a over b seconds.
  double a = 0.0;
  double b = 0.0;

  double value(long k, double dt) const;
  double end_value() const;
};

/// A scenario resolved against a model: phase windows in steps and a
/// piecewise command for every actuator channel.
class BoundScenario {
 public:
  BoundScenario(const ScenarioDef& scenario, const ModelDef& model);

  const ScenarioDef& scenario() const { return scenario_; }
  const ActuatorSet& actuators() const { return actuators_; }
  const std::vector<PhaseWindow>& phases() const { return phases_; }
  long step_count() const { return phases_.empty() ? 0 : phases_.back().end; }
  double timestep() const { return scenario_.timestep; }

  /// Channel commands at step k, in channel order.
  std::vector<double> commands(long k) const;
  /// Base-frame thrust wrench at step k (zero outside thrust phases).
  Wrench thrust(long k) const;

 private:
  ScenarioDef scenario_;
  ActuatorSet actuators_;
  std::vector<PhaseWindow> phases_;
  std::vector<std::vector<CommandSegment>> channel_segments_;
  struct ThrustSegment {
    long start = 0;
    long end = 0;
    double duration = 0.0;
    Vec6 hold = Vec6::Zero();
    Vec6 ramp = Vec6::Zero();
  };
  std::vector<ThrustSegment> thrust_segments_;
  std::vector<double> initial_commands_;
};

struct RunOptions {
  SolverConfig solver;
  /// Adds diag_iters and diag_residual columns.
  bool diagnostics = false;
};

struct RunStats {
  /// Largest per-step linear momentum audit residual, kg*m/s.
  double momentum_residual = 0.0;
  /// Largest per-step sum of contact impulse magnitudes, N*s.
  double peak_step_impulse = 0.0;
  long steps = 0;
};

/// Resolves the scenario's model field: a builtin id or a model-file path.
/// Throws BindError when it names neither, ParseError or ModelError when the
/// file is invalid.
ModelDef resolve_model(const ScenarioDef& scenario);

/// Throws BindError when the scenario does not fit the model, NumericalError
/// when the dynamics fail.
TrajectoryLog run_scenario(const ScenarioDef& scenario, const ModelDef& model,
                           const RunOptions& options = {}, RunStats* stats = nullptr);

}  // namespace floatgrip
