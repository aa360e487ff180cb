#include "lockbox/sim/se3.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/SVD>

namespace lockbox::sim {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kSmallAngle = 1e-8;

// V(w) = I + (1 - cos t)/t^2 W + (t - sin t)/t^3 W^2, the left Jacobian of SO(3).
Eigen::Matrix3d left_jacobian(const Eigen::Vector3d& w) {
  const double theta = w.norm();
  const Eigen::Matrix3d W = hat(w);
  if (theta < 1e-5) return Eigen::Matrix3d::Identity() + 0.5 * W + W * W / 6.0;
  const double t2 = theta * theta;
  return Eigen::Matrix3d::Identity() + (1.0 - std::cos(theta)) / t2 * W +
         (theta - std::sin(theta)) / (t2 * theta) * W * W;
}

Eigen::Matrix3d left_jacobian_inverse(const Eigen::Vector3d& w) {
  const double theta = w.norm();
  const Eigen::Matrix3d W = hat(w);
  if (theta < 1e-5) return Eigen::Matrix3d::Identity() - 0.5 * W + W * W / 12.0;
  const double half = 0.5 * theta;
  const double coeff = (1.0 - half * std::cos(half) / std::sin(half)) / (theta * theta);
  return Eigen::Matrix3d::Identity() - 0.5 * W + coeff * W * W;
}

}  // namespace

Eigen::Matrix3d hat(const Eigen::Vector3d& w) {
  Eigen::Matrix3d m;
  m << 0.0, -w.z(), w.y(),
       w.z(), 0.0, -w.x(),
      -w.y(), w.x(), 0.0;
  return m;
}

Eigen::Matrix3d so3_exp(const Eigen::Vector3d& w) {
  const double theta = w.norm();
  if (theta < kSmallAngle) return Eigen::Matrix3d::Identity() + hat(w);
  return Eigen::AngleAxisd(theta, w / theta).toRotationMatrix();
}

Eigen::Vector3d so3_log(const Eigen::Matrix3d& r) {
  Eigen::Quaterniond q(r);
  q.normalize();
  if (q.w() < 0.0) q.coeffs() *= -1.0;
  const double n = q.vec().norm();
  const double theta = 2.0 * std::atan2(n, q.w());
  if (theta > kPi - 1e-6) throw LogSingularity("rotation angle at pi, log is not unique");
  if (n < 1e-12) return 2.0 * q.vec() / q.w();
  return q.vec() * (theta / n);
}

RigidPose se3_exp(const Twist& xi) {
  const Eigen::Vector3d w = xi.head<3>();
  const Eigen::Vector3d v = xi.tail<3>();
  return {so3_exp(w), left_jacobian(w) * v};
}

Twist se3_log(const RigidPose& pose) {
  Twist xi;
  const Eigen::Vector3d w = so3_log(pose.rotation);
  xi.head<3>() = w;
  xi.tail<3>() = left_jacobian_inverse(w) * pose.translation;
  return xi;
}

Twist se3_log(const RigidPose& a, const RigidPose& b) { return se3_log(a.inverse() * b); }

RigidPose se3_exp(const RigidPose& pose, const Twist& delta) { return pose * se3_exp(delta); }

Eigen::Matrix3d orthonormalize(const Eigen::Matrix3d& r) {
  Eigen::JacobiSVD<Eigen::Matrix3d> svd(r, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Eigen::Matrix3d u = svd.matrixU();
  const Eigen::Matrix3d v = svd.matrixV();
  if ((u * v.transpose()).determinant() < 0.0) u.col(2) *= -1.0;
  return u * v.transpose();
}

double orthonormality_error(const Eigen::Matrix3d& r) {
  const double gram = (r.transpose() * r - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff();
  return std::max(gram, std::abs(r.determinant() - 1.0));
}

RigidPose grasp_pose_from_handle(const RigidPose& handle, const RigidPose& handle_to_grasp) {
  return handle * handle_to_grasp;
}

RigidPose handle_to_grasp_from_demo(const RigidPose& handle, const RigidPose& grasp) {
  return handle.inverse() * grasp;
}

}  // namespace lockbox::sim
