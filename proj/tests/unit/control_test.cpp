#include <cmath>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "lockbox/sim/control.hpp"

namespace lockbox::sim {
namespace {

JointMechanism prismatic(const Eigen::Vector3d& axis, double range) {
  JointSpec joint;
  joint.id = "P";
  joint.kind = JointKind::prismatic;
  joint.handle_position = {0.1, 0.0, 0.3};
  joint.mechanism = MechanismGeometry{axis, range, 0.0};
  return make_mechanism(joint);
}

JointMechanism revolute(double radius, double range) {
  JointSpec joint;
  joint.id = "R";
  joint.kind = JointKind::revolute;
  joint.handle_position = {-0.1, 0.0, 0.35};
  joint.mechanism = MechanismGeometry{Eigen::Vector3d::UnitY(), range, radius};
  return make_mechanism(joint);
}

Wrench force(double fx, double fy, double fz) {
  Wrench w = Wrench::Zero();
  w.tail<3>() << fx, fy, fz;
  return w;
}

const ControlParams kParams{};

TEST(SimulateStep, OnManifoldCommandHasNoReaction) {
  auto mech = prismatic(Eigen::Vector3d::UnitX(), 0.1);
  const RigidPose cmd = mech.ee_pose(0.04);
  const auto r = simulate_step(mech, false, cmd);
  EXPECT_NEAR(r.q, 0.04, 1e-12);
  EXPECT_LT(r.wrench.norm(), 1e-9);
}

TEST(SimulateStep, LockedPrismaticSpring) {
  auto mech = prismatic(Eigen::Vector3d::UnitX(), 0.1);
  RigidPose cmd = mech.ee_pose();
  cmd.translation += 0.01 * Eigen::Vector3d::UnitX();
  const auto r = simulate_step(mech, true, cmd);
  EXPECT_EQ(r.q, 0.0);
  // world x is end-effector x for the wall grasp
  EXPECT_NEAR(r.wrench[3], -10.0, 1e-9);
  EXPECT_NEAR(r.wrench.head<3>().norm() + std::abs(r.wrench[4]) + std::abs(r.wrench[5]), 0.0,
              1e-9);
}

TEST(SimulateStep, ClampsPastRangeAndReacts) {
  auto mech = prismatic(Eigen::Vector3d::UnitX(), 0.1);
  const double overshoot = 0.004;
  RigidPose cmd = mech.ee_pose(0.1);
  cmd.translation += overshoot * Eigen::Vector3d::UnitX();
  const auto r = simulate_step(mech, false, cmd);
  EXPECT_DOUBLE_EQ(r.q, 0.1);
  EXPECT_NEAR(r.wrench.norm(), 1000.0 * overshoot, 1e-9);
}

TEST(SimulateStep, RevoluteProjectionTracksArc) {
  auto mech = revolute(0.15, M_PI / 2);
  const auto r = simulate_step(mech, false, mech.ee_pose(0.7));
  EXPECT_NEAR(r.q, 0.7, 1e-12);
  EXPECT_LT(r.wrench.norm(), 1e-9);
}

TEST(WrenchGate, ZeroWrenchTakesSmoothedClampedStep) {
  const RigidPose prev;
  const RigidPose goal = RigidPose::from_translation({1.0, -1.0, 0.0});
  const auto next = wrench_gated_interpolate(prev, goal, Wrench::Zero(), kParams.twist_limit,
                                             kParams.wrench_limit, kParams.dt);
  const double step = 0.05 * 0.01 * std::tanh(10.0);
  EXPECT_NEAR(next.translation.x(), step, 1e-15);
  EXPECT_NEAR(next.translation.y(), -step, 1e-15);
  EXPECT_NEAR(next.translation.z(), 0.0, 1e-15);
}

TEST(WrenchGate, LargeLimitGivesFullClampedStep) {
  const RigidPose goal = RigidPose::from_translation({1.0, 0.0, 0.0});
  Vector6d huge = Vector6d::Constant(1e6);
  const auto next =
      wrench_gated_interpolate(RigidPose{}, goal, Wrench::Zero(), kParams.twist_limit, huge, 0.01);
  EXPECT_NEAR(next.translation.x(), 0.05 * 0.01, 1e-15);
}

TEST(WrenchGate, HoldsExactlyAtTheLimit) {
  const RigidPose prev = RigidPose::from_translation({0.2, 0.1, 0.3});
  const RigidPose goal = RigidPose::from_translation({1.0, 1.0, 1.0});
  Wrench at_limit = kParams.wrench_limit;
  at_limit[4] *= -1.0;
  const auto next = wrench_gated_interpolate(prev, goal, at_limit, kParams.twist_limit,
                                             kParams.wrench_limit, kParams.dt);
  EXPECT_EQ(next.translation, prev.translation);
  EXPECT_EQ(next.rotation, prev.rotation);
}

TEST(WrenchGate, RetreatsAlongWrenchSign) {
  const RigidPose goal = RigidPose::from_translation({1.0, 0.0, 0.0});
  const auto next = wrench_gated_interpolate(RigidPose{}, goal, force(12.0, 0.0, 0.0),
                                             kParams.twist_limit, kParams.wrench_limit, kParams.dt);
  // sign(12) * tanh(|10 - 12|) * V_m dt
  EXPECT_NEAR(next.translation.x(), std::tanh(2.0) * 0.05 * 0.01, 1e-15);
  EXPECT_NEAR(std::tanh(2.0), 0.964, 1e-3);
  const auto back = wrench_gated_interpolate(RigidPose{}, goal, force(-12.0, 0.0, 0.0),
                                             kParams.twist_limit, kParams.wrench_limit, kParams.dt);
  EXPECT_NEAR(back.translation.x(), -std::tanh(2.0) * 0.05 * 0.01, 1e-15);
}

TEST(WrenchGate, RejectsBadLimits) {
  Vector6d bad = kParams.twist_limit;
  bad[2] = 0.0;
  EXPECT_THROW(wrench_gated_interpolate({}, {}, Wrench::Zero(), bad, kParams.wrench_limit, 0.01),
               std::invalid_argument);
  EXPECT_THROW(wrench_gated_interpolate({}, {}, Wrench::Zero(), kParams.twist_limit,
                                        kParams.wrench_limit, 0.0),
               std::invalid_argument);
}

TEST(WrenchGate, RetreatMonotonicity) {
  // Start with the command pressed 2 cm into a locked joint and keep the goal
  // further in: every gated step taken while over the limit reduces |F|.
  for (double sign : {1.0, -1.0}) {
    auto mech = prismatic(Eigen::Vector3d::UnitX(), 0.1);
    RigidPose commanded = mech.ee_pose();
    commanded.translation.x() += sign * 0.02;
    RigidPose goal = commanded;
    goal.translation.x() += sign * 0.05;
    auto step = simulate_step(mech, true, commanded);
    ASSERT_NEAR(std::abs(step.wrench[3]), 20.0, 1e-9);
    int over = 0;
    while (std::abs(step.wrench[3]) > kParams.wrench_limit[3] + 1e-9) {
      const double before = std::abs(step.wrench[3]);
      commanded = wrench_gated_interpolate(commanded, goal, step.wrench, kParams.twist_limit,
                                           kParams.wrench_limit, kParams.dt);
      step = simulate_step(mech, true, commanded);
      ASSERT_LT(std::abs(step.wrench[3]), before);
      ASSERT_LT(++over, 1000);
    }
    EXPECT_GT(over, 10);
    // once back under the limit the gate never pushes it over again
    for (int i = 0; i < 500; ++i) {
      commanded = wrench_gated_interpolate(commanded, goal, step.wrench, kParams.twist_limit,
                                           kParams.wrench_limit, kParams.dt);
      step = simulate_step(mech, true, commanded);
      ASSERT_LE(std::abs(step.wrench[3]), kParams.wrench_limit[3] + 1e-9);
    }
  }
}

TEST(Wiggle, LockedJointIsNotMovable) {
  auto mech = prismatic(Eigen::Vector3d::UnitX(), 0.1);
  const auto r = wiggle(mech, true, kParams);
  EXPECT_FALSE(r.movable);
  EXPECT_LT(r.best_displacement.norm(), 1e-12);
  EXPECT_EQ(r.probes, 6);
}

TEST(Wiggle, PrismaticAlongEndEffectorY) {
  // end-effector +y is world -z for the wall grasp
  auto mech = prismatic(-Eigen::Vector3d::UnitZ(), 0.1);
  const Eigen::Vector3d ee_y = mech.ee_pose().rotation.col(1);
  ASSERT_LT((ee_y + Eigen::Vector3d::UnitZ()).norm(), 1e-12);
  const auto r = wiggle(mech, false, kParams);
  EXPECT_TRUE(r.movable);
  EXPECT_GT(r.best_displacement.normalized().dot(ee_y), 1.0 - 1e-9);
  EXPECT_EQ(mech.q, 0.0);
}

TEST(Wiggle, JointAtUpperLimitStillMovable) {
  auto mech = prismatic(Eigen::Vector3d::UnitX(), 0.1);
  mech.q = mech.q_max;
  const auto r = wiggle(mech, false, kParams);
  EXPECT_TRUE(r.movable);
  EXPECT_LT(r.best_displacement.x(), -kParams.move_threshold);
  EXPECT_EQ(mech.q, mech.q_max);
}

TEST(Wiggle, RestoresMechanismState) {
  auto mech = revolute(0.12, M_PI / 2);
  mech.q = 0.4;
  const auto r = wiggle(mech, false, kParams);
  EXPECT_TRUE(r.movable);
  EXPECT_EQ(mech.q, 0.4);
}

TEST(Follow, PrismaticTravelsFullRange) {
  auto mech = prismatic(Eigen::Vector3d::UnitX(), 0.1);
  std::mt19937_64 rng(1);
  const auto probe = wiggle(mech, false, kParams);
  const auto r = follow_admissible_direction(mech, false, probe.best_displacement, kParams, rng);
  ASSERT_TRUE(r.success) << r.failure;
  const Eigen::Vector3d span = r.trajectory.positions.back() - r.trajectory.positions.front();
  EXPECT_NEAR(span.norm(), 0.1, 1e-3);
  EXPECT_GT(span.normalized().dot(Eigen::Vector3d::UnitX()), 1.0 - 1e-6);
  EXPECT_DOUBLE_EQ(mech.q, mech.q_max);
}

TEST(Follow, RevoluteTracesTheArc) {
  auto mech = revolute(0.15, M_PI / 2);
  std::mt19937_64 rng(2);
  const auto probe = wiggle(mech, false, kParams);
  ASSERT_TRUE(probe.movable);
  const auto r = follow_admissible_direction(mech, false, probe.best_displacement, kParams, rng);
  ASSERT_TRUE(r.success) << r.failure;
  EXPECT_NEAR(mech.q, mech.q_max, 1e-9);
  // ground-truth circle: center on the hinge axis, radius of the grasp point
  const Eigen::Vector3d start = r.trajectory.positions.front();
  auto planar_radius = [&](const Eigen::Vector3d& p) {
    Eigen::Vector3d v = p - mech.anchor;
    v -= mech.axis.dot(v) * mech.axis;
    return v.norm();
  };
  const double radius = planar_radius(start);
  double worst = 0.0;
  for (const auto& p : r.trajectory.positions) worst = std::max(worst, std::abs(planar_radius(p) - radius));
  EXPECT_LT(worst, 2e-3);
  const Eigen::Vector3d end = r.trajectory.positions.back();
  EXPECT_NEAR((end - start).norm(), std::sqrt(2.0) * radius, 2e-3);  // 90 degree chord
}

TEST(Follow, LockedJointFails) {
  auto mech = prismatic(Eigen::Vector3d::UnitX(), 0.1);
  std::mt19937_64 rng(3);
  const auto r = follow_admissible_direction(mech, true, Eigen::Vector3d::UnitX(), kParams, rng);
  EXPECT_FALSE(r.success);
  EXPECT_EQ(r.failure, "no progress");
  EXPECT_EQ(mech.q, 0.0);
}

TEST(Follow, WrenchStaysWithinOneStepOvershoot) {
  const Vector6d bound =
      kParams.wrench_limit +
      default_stiffness().cwiseProduct(kParams.twist_limit) * kParams.dt;
  for (int kind = 0; kind < 2; ++kind) {
    auto mech = kind == 0 ? prismatic(Eigen::Vector3d::UnitX(), 0.1) : revolute(0.12, M_PI / 2);
    std::mt19937_64 rng(4);
    std::vector<TraceSample> trace;
    const auto probe = wiggle(mech, false, kParams, &trace);
    const auto r =
        follow_admissible_direction(mech, false, probe.best_displacement, kParams, rng, &trace);
    ASSERT_TRUE(r.success) << r.failure;
    for (const auto& s : trace) {
      for (int i = 0; i < 6; ++i) ASSERT_LE(std::abs(s.wrench[i]), bound[i] + 1e-9) << i;
    }
  }
}

TEST(Follow, NoisyDirectionEstimateStillArrives) {
  ControlParams noisy = kParams;
  noisy.direction_noise = 2e-4;
  auto mech = revolute(0.12, M_PI / 2);
  std::mt19937_64 rng(5);
  const auto probe = wiggle(mech, false, noisy);
  const auto r = follow_admissible_direction(mech, false, probe.best_displacement, noisy, rng);
  ASSERT_TRUE(r.success) << r.failure;
  EXPECT_NEAR(mech.q, mech.q_max, 1e-9);
}

TEST(Replay, ReversedTrajectoryReturnsJoint) {
  auto mech = revolute(0.12, M_PI / 2);
  std::mt19937_64 rng(6);
  const auto probe = wiggle(mech, false, kParams);
  const auto forward =
      follow_admissible_direction(mech, false, probe.best_displacement, kParams, rng);
  ASSERT_TRUE(forward.success);
  const auto back = replay_trajectory(mech, false, forward.trajectory.reversed(), kParams);
  ASSERT_TRUE(back.success) << back.failure;
  EXPECT_NEAR(mech.q, 0.0, 1e-9);
  const auto again = replay_trajectory(mech, false, forward.trajectory, kParams);
  ASSERT_TRUE(again.success) << again.failure;
  EXPECT_NEAR(mech.q, mech.q_max, 1e-9);
  const auto locked = replay_trajectory(mech, true, forward.trajectory.reversed(), kParams);
  EXPECT_FALSE(locked.success);
  EXPECT_NEAR(mech.q, mech.q_max, 1e-9);
}

TEST(TraceCsv, HeaderAndColumnOrder) {
  std::vector<TraceSample> trace{{0.01, {1, 2, 3}, (Wrench() << 4, 5, 6, 7, 8, 9).finished()}};
  std::ostringstream out;
  write_trace_csv(out, trace);
  EXPECT_EQ(out.str(), "t,x,y,z,fx,fy,fz,tx,ty,tz\n0.01,1,2,3,7,8,9,4,5,6\n");
}

}  // namespace
}  // namespace lockbox::sim
