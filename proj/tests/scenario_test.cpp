#include <gtest/gtest.h>

#include <random>
#include <string>

#include "floatgrip/errors.hpp"
#include "floatgrip/scenario.hpp"
#include "test_util.hpp"

namespace floatgrip {
namespace {

using testing_util::random_scenario;

TEST(ParseScenarioTest, MinimalScenarioTakesDefaults) {
  const ScenarioDef s = parse_scenario("scenario \"s\" { phase a { duration 1 } }");
  EXPECT_EQ(s.name, "s");
  EXPECT_TRUE(s.model.empty());
  EXPECT_DOUBLE_EQ(s.timestep, 1e-3);
  EXPECT_EQ(s.gravity, (std::array<double, 3>{0, 0, 0}));
  ASSERT_EQ(s.phases.size(), 1u);
  EXPECT_TRUE(s.log.empty());
}

TEST(ParseScenarioTest, FullGrammar) {
  const ScenarioDef s = parse_scenario(R"(# leading comment
scenario "demo" {
  model "astrobee-claw"   # trailing comment
  timestep 0.0005
  gravity 0 0 -9.81
  seed 7
  phase go {
    duration 2.5
    thrust 1 0 0 0 0 0.5 ramp
    joint tilt trapezoid 0.3 0.2
    joint pan ramp 0 1
    joint wrist step -0.1
    gripper close 0.5
  }
  log base_position contacts
}
)");
  EXPECT_EQ(s.model, "astrobee-claw");
  EXPECT_DOUBLE_EQ(s.timestep, 5e-4);
  EXPECT_DOUBLE_EQ(s.gravity[2], -9.81);
  EXPECT_EQ(s.seed, 7);
  ASSERT_EQ(s.phases.size(), 1u);
  const auto& cmds = s.phases[0].commands;
  ASSERT_EQ(cmds.size(), 5u);
  const auto& th = std::get<ThrustDef>(cmds[0]);
  EXPECT_EQ(th.mode, ThrustMode::Ramp);
  EXPECT_DOUBLE_EQ(th.wrench[5], 0.5);
  const auto& tilt = std::get<JointCommandDef>(cmds[1]);
  EXPECT_EQ(tilt.joint, "tilt");
  EXPECT_EQ(tilt.profile, (Profile{ProfileKind::Trapezoid, 0.3, 0.2}));
  EXPECT_EQ(std::get<JointCommandDef>(cmds[2]).profile, (Profile{ProfileKind::Ramp, 0.0, 1.0}));
  EXPECT_EQ(std::get<JointCommandDef>(cmds[3]).profile.a, -0.1);
  EXPECT_EQ(std::get<GripperDef>(cmds[4]), (GripperDef{GripAction::Close, 0.5}));
  EXPECT_EQ(s.log, (std::vector<std::string>{"base_position", "contacts"}));
}

struct ErrorCase {
  const char* text;
  ParseError::Kind kind;
  int line;
  int column;
};

TEST(ParseScenarioTest, ErrorsArePositioned) {
  const ErrorCase cases[] = {
      {"scenario \"s\" {\n  phase tilt { duration -1 }\n}", ParseError::Kind::Semantic, 2, 25},
      {"scenario \"s\" {\n  phase a { duration 0 }\n}", ParseError::Kind::Semantic, 2, 22},
      {"scenario \"s\" {\n  timestep 0\n  phase a { duration 1 }\n}", ParseError::Kind::Semantic, 2, 12},
      {"scenario \"s\" {\n  phase a { duration x }\n}", ParseError::Kind::Syntax, 2, 22},
      {"scenario s { }", ParseError::Kind::Syntax, 1, 10},
      {"scenario \"s\" {\n}", ParseError::Kind::Semantic, 2, 1},
      {"scenario \"s\" {\n  phase a { duration 1 }\n  phase a { duration 1 }\n}",
       ParseError::Kind::Semantic, 3, 9},
      {"scenario \"s\" {\n  phase a { duration 1\n    joint t wiggle 1 }\n}", ParseError::Kind::Syntax,
       3, 13},
      {"scenario \"s\" {\n  phase a { duration 1 joint t trapezoid 1 0.7 }\n}",
       ParseError::Kind::Semantic, 2, 44},
      {"scenario \"s\" {\n  phase a { duration 1 }\n  log speed\n}", ParseError::Kind::Semantic, 3, 7},
      {"scenario \"s\" {\n  phase a { duration 1 }\n  seed 3\n}", ParseError::Kind::Syntax, 3, 3},
      {"scenario \"s\" {\n  seed 1\n  seed 2\n  phase a { duration 1 }\n}", ParseError::Kind::Semantic,
       3, 3},
      {"scenario \"s\" {\n  phase a { duration 1 thrust 1 2 3 hold }\n}", ParseError::Kind::Syntax, 2,
       37},
      {"scenario \"unterminated {\n", ParseError::Kind::Syntax, 1, 10},
      {"scenario \"s\" { phase a { duration 1 } } extra", ParseError::Kind::Syntax, 1, 41},
      {"scenario \"s\" { phase a { duration 1 gripper close -1 } }", ParseError::Kind::Semantic, 1, 51},
  };
  for (const auto& c : cases) {
    SCOPED_TRACE(c.text);
    try {
      parse_scenario(c.text);
      ADD_FAILURE() << "no error";
    } catch (const ParseError& e) {
      EXPECT_EQ(e.kind(), c.kind) << e.what();
      EXPECT_EQ(e.line(), c.line) << e.what();
      EXPECT_EQ(e.column(), c.column) << e.what();
    }
  }
}

TEST(ParseScenarioTest, RoundTripOnGeneratedScenarios) {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 100; ++i) {
    const ScenarioDef s = random_scenario(rng);
    const std::string text = serialize_scenario(s);
    SCOPED_TRACE(text);
    const ScenarioDef back = parse_scenario(text);
    EXPECT_EQ(back, s);
    EXPECT_EQ(serialize_scenario(back), text);
  }
}

TEST(ParseScenarioTest, EmptyLogRoundTrips) {
  ScenarioDef s = builtin_scenario("claw-pan");
  s.log.clear();
  EXPECT_EQ(parse_scenario(serialize_scenario(s)), s);
}

// Mutates a valid text by byte edits, or emits token soup. Every input must
// parse or raise ParseError.
TEST(ParseScenarioTest, FuzzNeverCrashes) {
  std::mt19937_64 rng(5);
  static const char* words[] = {"scenario", "\"x\"", "{", "}", "phase", "p", "duration", "1",
                                "-1", "thrust", "hold", "ramp", "joint", "step", "trapezoid",
                                "0.25", "gripper", "open", "close", "log", "joints", "model",
                                "timestep", "gravity", "seed", "#", "\n", "1e999", "nan"};
  const std::string base = serialize_scenario(builtin_scenario("dexcohand-tilt"));
  int parsed = 0;
  for (int i = 0; i < 100000; ++i) {
    const std::string text = testing_util::fuzz_input(rng, base, words, i);
    try {
      parse_scenario(text);
      ++parsed;
    } catch (const ParseError& e) {
      EXPECT_GE(e.line(), 1);
      EXPECT_GE(e.column(), 1);
    }
  }
  EXPECT_GT(parsed, 0);
}

TEST(BuiltinScenarioTest, PerchThenManeuver) {
  const auto all = builtin_scenarios();
  ASSERT_EQ(all.size(), 4u);
  for (const auto& s : all) {
    SCOPED_TRACE(s.name);
    ASSERT_EQ(s.phases.size(), 3u);
    EXPECT_EQ(s.phases[0].name, "approach");
    EXPECT_EQ(s.phases[1].name, "perch");
    EXPECT_DOUBLE_EQ(s.total_duration(), 13.0);
    const std::string joint = s.name.substr(s.name.find('-') + 1);
    EXPECT_EQ(s.phases[2].name, joint);
    for (const auto& p : s.phases) {
      for (const auto& c : p.commands) {
        if (const auto* j = std::get_if<JointCommandDef>(&c)) EXPECT_EQ(j->joint, joint);
      }
    }
    EXPECT_EQ(parse_scenario(serialize_scenario(s)), s);
  }
}

TEST(BuiltinScenarioTest, GrippersDifferOnlyInModel) {
  for (const char* m : {"tilt", "pan"}) {
    ScenarioDef claw = builtin_scenario(std::string("claw-") + m);
    ScenarioDef dex = builtin_scenario(std::string("dexcohand-") + m);
    EXPECT_EQ(claw.model, kClawModelId);
    EXPECT_EQ(dex.model, kDexCoHandModelId);
    dex.model = claw.model;
    dex.name = claw.name;
    EXPECT_EQ(claw, dex);
  }
}

TEST(BuiltinScenarioTest, UnknownNameThrows) {
  EXPECT_THROW(builtin_scenario("claw-roll"), std::out_of_range);
}

}  // namespace
}  // namespace floatgrip
