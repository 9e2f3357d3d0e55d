#pragma once

// Base-motion metrics of a perch-and-maneuver log.
//
// Axis convention (world frame, rail along y): tilt swings the base through
// the x-z plane, so z is its intended coordinate and y the orthogonal one;
// pan sweeps the base through the x-y plane, so y is intended and z
// orthogonal. All three axes are reported either way. Deviations are taken
// relative to the base position at the end of the perch phase.

#include <array>
#include <optional>
#include <string>
#include <string_view>

#include "floatgrip/trajectory.hpp"

namespace floatgrip {

enum class Maneuver { Tilt, Pan };

std::string_view to_string(Maneuver m);
std::optional<Maneuver> parse_maneuver(std::string_view text);

/// Intended and orthogonal base coordinates (0 = x, 1 = y, 2 = z).
int intended_axis(Maneuver m);
int orthogonal_axis(Maneuver m);

/// Displacement from the reference over the maneuver, mm.
struct AxisDeviation {
  double max_abs = 0.0;
  double min = 0.0;
  double max = 0.0;

  double span() const { return max - min; }
  friend bool operator==(const AxisDeviation&, const AxisDeviation&) = default;
};

struct DeviationReport {
  std::string scenario;
  std::string model;
  Maneuver maneuver = Maneuver::Tilt;
  double reference_time = 0.0;
  std::array<AxisDeviation, 3> axes{};
  /// Signed displacement of largest magnitude along the intended axis, mm.
  double commanded_motion = 0.0;
  /// Fraction of maneuver steps with at least one active contact.
  double contact_fraction = 0.0;
  bool perch_success = false;
  /// Commanded trapezoid amplitude and largest joint excursion reached, rad.
  double joint_peak_commanded = 0.0;
  double joint_peak_reached = 0.0;
  bool maneuver_completed = false;

  const AxisDeviation& cross_axis() const { return axes[orthogonal_axis(maneuver)]; }
  /// The comparison figure: max |dy| for tilt, span of dz for pan.
  double headline() const;
  friend bool operator==(const DeviationReport&, const DeviationReport&) = default;
};

/// Throws std::invalid_argument when the log lacks base position or phase
/// metadata.
DeviationReport cross_axis_deviation(const TrajectoryLog& log, Maneuver maneuver);

/// Maneuver taken from the log's metadata.
DeviationReport cross_axis_deviation(const TrajectoryLog& log);

enum class Winner { A, B, Tie };

/// Ratios below this denominator, and differences below it, are not
/// meaningful (mm).
inline constexpr double kResolutionMm = 0.1;

struct MetricComparison {
  std::string label;
  double a = 0.0;
  double b = 0.0;
  /// a / b; meaningless when !reliable.
  double ratio = 0.0;
  bool reliable = true;
  Winner winner = Winner::Tie;
};

struct ComparisonReport {
  Maneuver maneuver = Maneuver::Tilt;
  DeviationReport a;
  DeviationReport b;
  /// max |d| per axis x, y, z.
  std::array<MetricComparison, 3> axes;
  MetricComparison headline;
};

/// Lower is better. Throws std::invalid_argument on a maneuver mismatch.
ComparisonReport compare(const DeviationReport& a, const DeviationReport& b);

std::string format_report(const DeviationReport& r);
std::string format_comparison(const ComparisonReport& c);

}  // namespace floatgrip
