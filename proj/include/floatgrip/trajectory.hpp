#pragma once

// Time-series log of a run and its CSV form:
//
//   # scenario=claw-tilt
//   # timestep=0.001
//   t,px,py,pz,qw,qx,qy,qz,q_joint_pan,...,fn_total
//   0,0.43,...
//
// Floats are written shortest-round-trip, so reading a written log gives
// back the same numbers bit for bit.

#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace floatgrip {

inline constexpr std::string_view kEngineVersion = "1.0.0";

struct TrajectoryLog {
  /// Metadata in file order.
  std::vector<std::pair<std::string, std::string>> meta;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  /// Column index or -1.
  int column(std::string_view name) const;
  /// Metadata value or empty.
  std::string meta_value(std::string_view key) const;
  /// Values of one column; throws std::out_of_range when missing.
  std::vector<double> series(std::string_view name) const;

  friend bool operator==(const TrajectoryLog&, const TrajectoryLog&) = default;
};

std::string write_csv(const TrajectoryLog& log);

/// Throws ParseError on malformed input (line of the offending row).
TrajectoryLog read_csv(std::string_view text);

}  // namespace floatgrip
