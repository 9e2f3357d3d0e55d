#pragma once

// Self-contained SVG line charts of trajectory-log channels against time.
// Fixed 800 x 400 viewBox with autoscaled, labelled axes. Base position
// channels (px, py, pz) are drawn in mm; any other column in its own units.

#include <string>
#include <vector>

#include "floatgrip/trajectory.hpp"

namespace floatgrip {

inline constexpr int kPlotWidth = 800;
inline constexpr int kPlotHeight = 400;

/// Columns that can be plotted: everything except t.
std::vector<std::string> plottable_channels(const TrajectoryLog& log);

/// One polyline per channel. Throws std::invalid_argument naming the
/// available channels when one is unknown, or when the log has no rows.
/// Identical inputs give identical bytes.
std::string plot_svg(const TrajectoryLog& log, const std::vector<std::string>& channels);

}  // namespace floatgrip
