#include "lockbox/sim/mechanism.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace lockbox::sim {

Vector6d default_stiffness() {
  Vector6d k;
  k << 50.0, 50.0, 50.0, 1000.0, 1000.0, 1000.0;
  return k;
}

RigidPose JointMechanism::handle_pose(double coordinate) const {
  if (kind == JointKind::prismatic) {
    RigidPose pose = handle_zero;
    pose.translation += coordinate * axis;
    return pose;
  }
  const Eigen::Matrix3d r = so3_exp(axis * coordinate);
  return {r * handle_zero.rotation, anchor + r * (handle_zero.translation - anchor)};
}

double JointMechanism::project(const Eigen::Vector3d& position) const {
  const Eigen::Vector3d origin = ee_pose(0.0).translation;
  if (kind == JointKind::prismatic) return axis.dot(position - origin);
  auto planar = [&](const Eigen::Vector3d& p) {
    const Eigen::Vector3d r = p - anchor;
    return Eigen::Vector3d(r - axis.dot(r) * axis);
  };
  const Eigen::Vector3d r0 = planar(origin);
  const Eigen::Vector3d r = planar(position);
  return std::atan2(axis.dot(r0.cross(r)), r0.dot(r));
}

RigidPose wall_handle_frame(const Eigen::Vector3d& position) {
  RigidPose pose;
  pose.rotation.col(0) = Eigen::Vector3d::UnitX();
  pose.rotation.col(1) = Eigen::Vector3d::UnitZ();
  pose.rotation.col(2) = -Eigen::Vector3d::UnitY();
  pose.translation = position;
  return pose;
}

RigidPose default_grasp_offset() {
  return {so3_exp(Eigen::Vector3d(M_PI, 0.0, 0.0)), Eigen::Vector3d(0.0, 0.0, 0.02)};
}

JointMechanism make_mechanism(const JointSpec& joint) {
  if (!joint.mechanism) {
    throw std::invalid_argument("joint '" + joint.id + "' has no mechanism geometry");
  }
  const auto& geometry = *joint.mechanism;
  JointMechanism mech;
  mech.kind = joint.kind;
  mech.axis = geometry.axis.normalized();
  mech.q_max = geometry.range;
  mech.handle_zero = wall_handle_frame(joint.handle_position);
  mech.grasp_offset = default_grasp_offset();
  if (joint.kind == JointKind::prismatic) {
    mech.anchor = joint.handle_position;
  } else {
    Eigen::Vector3d lever = Eigen::Vector3d::UnitX() - mech.axis.x() * mech.axis;
    if (lever.norm() < 1e-6) lever = Eigen::Vector3d::UnitZ() - mech.axis.z() * mech.axis;
    mech.anchor = joint.handle_position - geometry.radius * lever.normalized();
  }
  mech.q = joint.initial_state == 0 ? 0.0 : mech.q_max;
  return mech;
}

StepResult simulate_step(JointMechanism& mech, bool locked, const RigidPose& commanded) {
  if (!locked) mech.q = std::clamp(mech.project(commanded.translation), 0.0, mech.q_max);
  StepResult out;
  out.q = mech.q;
  out.achieved = mech.ee_pose();
  out.wrench = -mech.stiffness.cwiseProduct(se3_log(out.achieved, commanded));
  return out;
}

}  // namespace lockbox::sim
