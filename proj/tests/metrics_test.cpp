#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <numbers>

#include "floatgrip/errors.hpp"
#include "floatgrip/metrics.hpp"
#include "floatgrip/trajectory.hpp"

namespace floatgrip {
namespace {

// approach:0:10, perch:10:20, tilt:20:120 at dt = 0.01, base at rest at
// (0.4, 0.1, -0.05) unless `y` says otherwise.
TrajectoryLog synthetic_log(double (*y)(double)) {
  TrajectoryLog log;
  log.meta = {{"scenario", "synthetic"},
              {"model", "m"},
              {"phases", "approach:0:10;perch:10:20;tilt:20:120"},
              {"maneuver", "tilt"},
              {"maneuver_joint", "tilt"},
              {"maneuver_peak", "0.5"}};
  log.columns = {"t", "px", "py", "pz", "qw", "qx", "qy", "qz", "q_joint_tilt", "fn_total"};
  for (int k = 0; k <= 120; ++k) {
    const double t = 0.01 * k;
    const double tau = std::max(0.0, t - 0.2);
    const double joint = 0.5 * std::sin(std::numbers::pi * tau);
    log.rows.push_back({t, 0.4, 0.1 + (y ? y(tau) : 0.0), -0.05, 1, 0, 0, 0, joint, 2.0});
  }
  return log;
}

TEST(DeviationTest, StillLogHasNoDeviation) {
  const DeviationReport r = cross_axis_deviation(synthetic_log(nullptr));
  for (const auto& a : r.axes) {
    EXPECT_EQ(a.max_abs, 0.0);
    EXPECT_EQ(a.span(), 0.0);
  }
  EXPECT_DOUBLE_EQ(r.reference_time, 0.2);
  EXPECT_TRUE(r.perch_success);
  EXPECT_TRUE(r.maneuver_completed);
  EXPECT_EQ(r.headline(), 0.0);
}

TEST(DeviationTest, SineOnOrthogonalAxis) {
  const TrajectoryLog log =
      synthetic_log([](double tau) { return 0.080 * std::sin(std::numbers::pi * tau / 2.0); });
  const DeviationReport tilt = cross_axis_deviation(log);
  EXPECT_NEAR(tilt.axes[1].max_abs, 80.0, 1e-9);
  EXPECT_NEAR(tilt.headline(), 80.0, 1e-9);
  EXPECT_EQ(tilt.axes[0].max_abs, 0.0);
  EXPECT_EQ(tilt.axes[2].max_abs, 0.0);
  // As a pan the same motion is along the intended axis.
  const DeviationReport pan = cross_axis_deviation(log, Maneuver::Pan);
  EXPECT_EQ(pan.headline(), 0.0);
  EXPECT_NEAR(pan.commanded_motion, 80.0, 1e-9);
}

TEST(DeviationTest, ContactLossFailsPerch) {
  TrajectoryLog log = synthetic_log(nullptr);
  const int fn = log.column("fn_total");
  for (int k = 60; k <= 120; ++k) log.rows[k][fn] = 0.0;
  EXPECT_FALSE(cross_axis_deviation(log).perch_success);
}

TEST(DeviationTest, MissingDataThrows) {
  TrajectoryLog log = synthetic_log(nullptr);
  TrajectoryLog no_phases = log;
  no_phases.meta.erase(no_phases.meta.begin() + 2);
  EXPECT_THROW(cross_axis_deviation(no_phases), std::invalid_argument);
  TrajectoryLog no_py = log;
  no_py.columns[2] = "vy";
  EXPECT_THROW(cross_axis_deviation(no_py), std::invalid_argument);
  TrajectoryLog short_log = log;
  short_log.rows.resize(50);
  EXPECT_THROW(cross_axis_deviation(short_log), std::invalid_argument);
}

DeviationReport report_with(Maneuver m, double cross) {
  DeviationReport r;
  r.maneuver = m;
  r.axes[orthogonal_axis(m)] = {cross, -cross, cross};
  return r;
}

TEST(CompareTest, EightyVersusTwenty) {
  const ComparisonReport c =
      compare(report_with(Maneuver::Tilt, 80.0), report_with(Maneuver::Tilt, 20.0));
  EXPECT_TRUE(c.headline.reliable);
  EXPECT_DOUBLE_EQ(c.headline.ratio, 4.0);
  EXPECT_EQ(c.headline.winner, Winner::B);
  EXPECT_EQ(c.axes[1].winner, Winner::B);
}

TEST(CompareTest, TinyDenominatorIsUnreliable) {
  const ComparisonReport c =
      compare(report_with(Maneuver::Tilt, 3.0), report_with(Maneuver::Tilt, 0.05));
  EXPECT_FALSE(c.headline.reliable);
  EXPECT_EQ(c.headline.winner, Winner::B);
  EXPECT_NE(format_comparison(c).find("unreliable"), std::string::npos);
}

TEST(CompareTest, EqualReportsTie) {
  const DeviationReport a = report_with(Maneuver::Pan, 2.5);
  const ComparisonReport c = compare(a, a);
  EXPECT_EQ(c.headline.winner, Winner::Tie);
  EXPECT_DOUBLE_EQ(c.headline.ratio, 1.0);
  for (const auto& m : c.axes) EXPECT_EQ(m.winner, Winner::Tie);
}

TEST(CompareTest, PanHeadlineIsSpan) {
  DeviationReport a = report_with(Maneuver::Pan, 0.0);
  a.axes[2] = {4.0, -2.0, 4.0};
  DeviationReport b = report_with(Maneuver::Pan, 0.0);
  b.axes[2] = {2.0, -2.0, 0.0};
  const ComparisonReport c = compare(a, b);
  EXPECT_DOUBLE_EQ(c.headline.a, 6.0);
  EXPECT_DOUBLE_EQ(c.headline.b, 2.0);
  EXPECT_EQ(c.headline.winner, Winner::B);
  EXPECT_EQ(c.headline.label, "z span");
}

TEST(CompareTest, ManeuverMismatchThrows) {
  EXPECT_THROW(compare(report_with(Maneuver::Pan, 1), report_with(Maneuver::Tilt, 1)),
               std::invalid_argument);
}

TEST(CompareTest, TableNamesBothModelsAndAllAxes) {
  DeviationReport a = report_with(Maneuver::Tilt, 8.0);
  a.model = "astrobee-claw";
  DeviationReport b = report_with(Maneuver::Tilt, 2.0);
  b.model = "astrobee-dexcohand";
  const std::string text = format_comparison(compare(a, b));
  EXPECT_NE(text.find("astrobee-claw"), std::string::npos);
  EXPECT_NE(text.find("astrobee-dexcohand"), std::string::npos);
  for (const char* axis : {"x max|d|", "y max|d|", "z max|d|"}) {
    EXPECT_NE(text.find(axis), std::string::npos) << axis;
  }
}

TEST(CsvTest, RoundTripIsBitExact) {
  TrajectoryLog log = synthetic_log([](double tau) { return 1e-3 * std::sin(7.0 * tau); });
  log.rows[5][1] = std::numeric_limits<double>::denorm_min();
  log.rows[6][1] = -0.0;
  log.rows[7][1] = 1.0 / 3.0;
  log.rows[8][1] = std::numeric_limits<double>::max();
  const std::string text = write_csv(log);
  const TrajectoryLog back = read_csv(text);
  EXPECT_EQ(back, log);
  EXPECT_EQ(write_csv(back), text);
}

TEST(CsvTest, MalformedInputIsPositioned) {
  struct Case {
    const char* text;
    int line;
  };
  const Case cases[] = {
      {"# a=1\nt,px\n0,1\n1\n", 4},
      {"t,px\n0,x\n", 2},
      {"t,px\n0,1\n# late=1\n", 3},
      {"# no equals\nt\n", 1},
      {"t,,px\n", 1},
      {"# a=1\n", 1},
  };
  for (const auto& c : cases) {
    SCOPED_TRACE(c.text);
    try {
      read_csv(c.text);
      ADD_FAILURE() << "no error";
    } catch (const ParseError& e) {
      EXPECT_EQ(e.line(), c.line) << e.what();
    }
  }
}

}  // namespace
}  // namespace floatgrip
