#include <gtest/gtest.h>

#include <cmath>
#include <set>
#include <sstream>

#include "floatgrip/plot.hpp"

namespace floatgrip {
namespace {

TrajectoryLog constant_log() {
  TrajectoryLog log;
  log.meta = {{"scenario", "still <&>"}, {"model", "m"}};
  log.columns = {"t", "px", "py", "pz", "fn_total"};
  for (int k = 0; k <= 2000; ++k) log.rows.push_back({0.001 * k, 0.4, 0.0, -0.05, 0.0});
  return log;
}

std::vector<std::string> polylines(const std::string& svg) {
  std::vector<std::string> out;
  const std::string key = "points=\"";
  for (auto at = svg.find("<polyline"); at != std::string::npos; at = svg.find("<polyline", at + 1)) {
    const auto begin = svg.find(key, at) + key.size();
    out.push_back(svg.substr(begin, svg.find('"', begin) - begin));
  }
  return out;
}

TEST(PlotTest, ConstantLogGivesHorizontalLines) {
  const std::string svg = plot_svg(constant_log(), {"px", "py", "pz"});
  EXPECT_NE(svg.find("viewBox=\"0 0 800 400\""), std::string::npos);
  EXPECT_NE(svg.find("(mm)"), std::string::npos);
  EXPECT_NE(svg.find("time (s)"), std::string::npos);
  EXPECT_NE(svg.find("still &lt;&amp;&gt;"), std::string::npos);
  const auto lines = polylines(svg);
  ASSERT_EQ(lines.size(), 3u);
  std::set<std::string> heights;
  for (const auto& pts : lines) {
    std::set<std::string> ys;
    std::set<std::string> xs;
    std::istringstream in(pts);
    for (std::string p; in >> p;) {
      const auto comma = p.find(',');
      xs.insert(p.substr(0, comma));
      ys.insert(p.substr(comma + 1));
    }
    EXPECT_EQ(ys.size(), 1u);
    EXPECT_GT(xs.size(), 100u);
    heights.insert(*ys.begin());
  }
  EXPECT_EQ(heights.size(), 3u);
}

TEST(PlotTest, OutputIsDeterministic) {
  TrajectoryLog log = constant_log();
  for (size_t k = 0; k < log.rows.size(); ++k) log.rows[k][2] = 0.002 * std::sin(0.01 * k);
  EXPECT_EQ(plot_svg(log, {"px", "py"}), plot_svg(log, {"px", "py"}));
}

TEST(PlotTest, LongLogsAreThinnedPerPixel) {
  TrajectoryLog log = constant_log();
  for (int k = 2001; k <= 13000; ++k) log.rows.push_back({0.001 * k, 0.4, 0.001 * std::sin(k), -0.05, 0.0});
  const auto lines = polylines(plot_svg(log, {"py"}));
  ASSERT_EQ(lines.size(), 1u);
  const auto points = std::count(lines[0].begin(), lines[0].end(), ',');
  EXPECT_LE(points, 4 * 701);
  EXPECT_GT(points, 700);
}

TEST(PlotTest, UnknownChannelListsAvailable) {
  try {
    plot_svg(constant_log(), {"px", "pw"});
    FAIL() << "no error";
  } catch (const std::invalid_argument& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("'pw'"), std::string::npos);
    EXPECT_NE(msg.find("px, py, pz, fn_total"), std::string::npos);
  }
  EXPECT_THROW(plot_svg(constant_log(), {"t"}), std::invalid_argument);
  EXPECT_THROW(plot_svg(constant_log(), {}), std::invalid_argument);
}

}  // namespace
}  // namespace floatgrip
