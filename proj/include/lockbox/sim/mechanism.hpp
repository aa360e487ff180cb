#pragma once

#include "lockbox/core/lockbox.hpp"
#include "lockbox/sim/se3.hpp"

namespace lockbox::sim {

// Spring gains used to turn the commanded/achieved residual into a wrench:
// 50 N m/rad on rotation, 1000 N/m on translation.
Vector6d default_stiffness();

// A grasped 1-DoF mechanism. q = 0 and q = q_max are the two binary states.
struct JointMechanism {
  JointKind kind = JointKind::prismatic;
  Eigen::Vector3d axis = Eigen::Vector3d::UnitX();
  // rotation center (revolute) or handle origin at q = 0 (prismatic)
  Eigen::Vector3d anchor = Eigen::Vector3d::Zero();
  RigidPose handle_zero;  // handle pose at q = 0
  double q_max = 0.1;
  double q = 0.0;
  Vector6d stiffness = default_stiffness();
  RigidPose grasp_offset;  // handle -> end-effector

  RigidPose handle_pose(double coordinate) const;
  RigidPose ee_pose(double coordinate) const { return handle_pose(coordinate) * grasp_offset; }
  RigidPose ee_pose() const { return ee_pose(q); }
  // Coordinate whose end-effector position is closest to `position`, unclamped.
  double project(const Eigen::Vector3d& position) const;
};

// Handle frame of a wall-mounted handle: z out of the wall (-y), y up.
RigidPose wall_handle_frame(const Eigen::Vector3d& position);

// Grasp 2 cm in front of the handle with the end-effector z pointing into
// the wall.
RigidPose default_grasp_offset();

// Mechanism for a joint of a config with mechanism geometry. For revolute
// joints the hinge sits `radius` from the handle along the in-plane
// direction closest to world x. Throws std::invalid_argument without geometry.
JointMechanism make_mechanism(const JointSpec& joint);

struct StepResult {
  double q = 0.0;
  RigidPose achieved;
  Wrench wrench = Wrench::Zero();
};

// Projects the commanded end-effector pose onto the mechanism (clamped to
// [0, q_max], frozen when locked), updates mech.q and returns the spring
// reaction -stiffness * log(achieved^-1 * commanded), expressed in the
// end-effector frame.
StepResult simulate_step(JointMechanism& mech, bool locked, const RigidPose& commanded);

}  // namespace lockbox::sim
