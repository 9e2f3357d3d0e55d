#include <gtest/gtest.h>

#include <Eigen/SVD>

#include "floatgrip/astrobee.hpp"
#include "floatgrip/compliance.hpp"
#include "floatgrip/model_io.hpp"
#include "floatgrip/scenario.hpp"

namespace floatgrip {
namespace {

// Rank of each fingertip's point Jacobian restricted to gripper-joint columns.
std::vector<int> fingertip_ranks(const ModelDef& model) {
  const State s = perch_configuration(model);
  const auto poses = forward_kinematics(model, s);
  const auto grip = gripper_links(model);
  std::vector<int> ranks;
  for (const auto& [link, point] : fingertip_points(model, poses)) {
    const Eigen::MatrixXd j = point_jacobian(model, poses, link, point);
    Eigen::MatrixXd cols(3, static_cast<Eigen::Index>(grip.size()));
    for (size_t c = 0; c < grip.size(); ++c) cols.col(c) = j.col(model.links[grip[c]].v_offset);
    const Eigen::JacobiSVD<Eigen::MatrixXd> svd(cols);
    int rank = 0;
    for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i) {
      if (svd.singularValues()[i] > 1e-9) ++rank;
    }
    ranks.push_back(rank);
  }
  return ranks;
}

TEST(AstrobeeTest, BuiltinIds) {
  EXPECT_TRUE(is_builtin_model(kClawModelId));
  EXPECT_TRUE(is_builtin_model(kDexCoHandModelId));
  EXPECT_FALSE(is_builtin_model("astrobee"));
  EXPECT_THROW(builtin_model("astrobee"), std::out_of_range);
}

TEST(AstrobeeTest, GripperJointCounts) {
  const ModelDef claw = build_astrobee_claw();
  const ModelDef dex = build_astrobee_dexcohand();
  EXPECT_EQ(gripper_links(claw).size(), 2u);
  EXPECT_EQ(gripper_links(dex).size(), 6u);

  // The claw's two jaws share one channel; the hand's joints are independent.
  const ActuatorSet claw_set = actuator_set(claw);
  const ActuatorSet dex_set = actuator_set(dex);
  ASSERT_GE(claw_set.find("claw"), 0);
  EXPECT_EQ(claw_set.channels[claw_set.find("claw")].joints.size(), 2u);
  EXPECT_EQ(claw_set.channels.size(), 3u);
  EXPECT_EQ(dex_set.channels.size(), 8u);
}

TEST(AstrobeeTest, SharedArm) {
  const ModelDef claw = build_astrobee_claw();
  const ModelDef dex = build_astrobee_dexcohand();
  for (const char* joint : {"pan", "tilt"}) {
    const int a = claw.link_index(joint);
    const int b = dex.link_index(joint);
    ASSERT_GE(a, 0);
    ASSERT_GE(b, 0);
    EXPECT_EQ(claw.links[a].joint.axis, dex.links[b].joint.axis);
    EXPECT_EQ(claw.links[a].joint_pose.translation, dex.links[b].joint_pose.translation);
    EXPECT_EQ(claw.links[a].joint_pose.rotation, dex.links[b].joint_pose.rotation);
    EXPECT_EQ(claw.links[a].joint.stiffness, dex.links[b].joint.stiffness);
  }
  EXPECT_DOUBLE_EQ(claw.links[0].inertia.mass, 9.58);
}

TEST(AstrobeeTest, ModelsSurviveFileRoundTrip) {
  for (const auto& m : {build_astrobee_claw(), build_astrobee_dexcohand()}) {
    const ModelDef back = parse_model(serialize_model(m));
    EXPECT_TRUE(structurally_equal(m, back));
  }
}

TEST(AstrobeeTest, FingertipColumnSpace) {
  const auto dex = fingertip_ranks(build_astrobee_dexcohand());
  ASSERT_EQ(dex.size(), 2u);
  for (int r : dex) EXPECT_EQ(r, 3);
  const auto claw = fingertip_ranks(build_astrobee_claw());
  ASSERT_EQ(claw.size(), 2u);
  for (int r : claw) EXPECT_LE(r, 1);
}

TEST(AstrobeeTest, PerchConfigurationClosesGripper) {
  const ModelDef dex = build_astrobee_dexcohand();
  const State s = perch_configuration(dex);
  for (int i : gripper_links(dex)) {
    const LinkDef& l = dex.links[i];
    ASSERT_TRUE(l.joint.grip.has_value());
    EXPECT_EQ(s.q[l.q_offset], l.joint.grip->close);
  }
}

}  // namespace
}  // namespace floatgrip
