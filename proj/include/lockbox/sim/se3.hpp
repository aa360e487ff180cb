#pragma once

#include <stdexcept>

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace lockbox::sim {

using Vector6d = Eigen::Matrix<double, 6, 1>;

// Exponential coordinates, angular part first: (wx, wy, wz, vx, vy, vz).
using Twist = Vector6d;
// Torque first: (tx, ty, tz, fx, fy, fz).
using Wrench = Vector6d;

struct RigidPose {
  Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();
  Eigen::Vector3d translation = Eigen::Vector3d::Zero();

  static RigidPose identity() { return {}; }
  static RigidPose from_translation(const Eigen::Vector3d& t) {
    return {Eigen::Matrix3d::Identity(), t};
  }

  RigidPose operator*(const RigidPose& rhs) const {
    return {rotation * rhs.rotation, rotation * rhs.translation + translation};
  }
  Eigen::Vector3d operator*(const Eigen::Vector3d& p) const { return rotation * p + translation; }

  RigidPose inverse() const {
    const Eigen::Matrix3d rt = rotation.transpose();
    return {rt, -(rt * translation)};
  }

  bool is_finite() const { return rotation.allFinite() && translation.allFinite(); }
};

class LogSingularity : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

Eigen::Matrix3d hat(const Eigen::Vector3d& w);

Eigen::Matrix3d so3_exp(const Eigen::Vector3d& w);
// Throws LogSingularity when the rotation angle is within 1e-6 of pi.
Eigen::Vector3d so3_log(const Eigen::Matrix3d& r);

RigidPose se3_exp(const Twist& xi);
Twist se3_log(const RigidPose& pose);

// log(a^-1 * b): the body-frame twist taking a to b.
Twist se3_log(const RigidPose& a, const RigidPose& b);
// pose * exp(delta)
RigidPose se3_exp(const RigidPose& pose, const Twist& delta);

// Nearest rotation in the Frobenius sense (polar decomposition via SVD).
Eigen::Matrix3d orthonormalize(const Eigen::Matrix3d& r);

// max(|R^T R - I|, |det R - 1|)
double orthonormality_error(const Eigen::Matrix3d& r);

// T_BG = T_BH * T_HG
RigidPose grasp_pose_from_handle(const RigidPose& handle, const RigidPose& handle_to_grasp);
// T_HG = T_BH^-1 * T_BG, learned once from a demonstrated grasp.
RigidPose handle_to_grasp_from_demo(const RigidPose& handle, const RigidPose& grasp);

}  // namespace lockbox::sim
