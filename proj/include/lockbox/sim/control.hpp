#pragma once

#include <cstdint>
#include <iosfwd>
#include <random>
#include <string>
#include <vector>

#include "lockbox/sim/mechanism.hpp"
#include "lockbox/sim/se3.hpp"

namespace lockbox::sim {

struct ControlParams {
  double dt = 0.01;  // control period, s
  Vector6d twist_limit = (Vector6d() << 0.5, 0.5, 0.5, 0.05, 0.05, 0.05).finished();
  Vector6d wrench_limit = (Vector6d() << 2.5, 2.5, 2.5, 10.0, 10.0, 10.0).finished();
  double wiggle_amplitude = 0.005;
  double move_threshold = 0.002;
  // success once the end-effector moved less than this over progress_window
  // steps while pressing against the wrench limit
  double progress_epsilon = 0.0005;
  int progress_window = 20;
  int max_iters = 2000;
  double lookahead = 0.02;          // goal distance ahead of the achieved pose
  double direction_update = 0.001;  // displacement needed to re-estimate d
  double grasp_tolerance = 0.03;    // translational residual that loses the handle
  double direction_noise = 0.0;     // sigma of Gaussian noise on observed displacement
  // fraction of the wrench limit that counts as "at the limit"
  double limit_fraction = 0.9;
};

// One gated interpolation step:
//   dpsi  = clamp(log(prev^-1 goal), -V_m dt, V_m dt)
//   dF    = F_m - |F_obs|
//   dpsi* = tanh(|dF|) dpsi                      where dF > 0
//         = sign(F_obs) tanh(|dF|) V_m dt         otherwise
// all componentwise; returns prev * exp(dpsi*).
RigidPose wrench_gated_interpolate(const RigidPose& prev, const RigidPose& goal,
                                   const Wrench& observed, const Vector6d& twist_limit,
                                   const Vector6d& wrench_limit, double dt);

struct TraceSample {
  double t = 0.0;
  Eigen::Vector3d position = Eigen::Vector3d::Zero();
  Wrench wrench = Wrench::Zero();
};

struct EETrajectory {
  std::vector<Eigen::Vector3d> positions;
  std::vector<double> stamps;

  std::size_t size() const { return positions.size(); }
  void push(double t, const Eigen::Vector3d& p) {
    stamps.push_back(t);
    positions.push_back(p);
  }
  EETrajectory reversed() const;
};

// Commanded pose + last measured wrench; every tick runs one gated
// interpolation and one simulation step and appends to the force trace.
class GatedController {
 public:
  GatedController(JointMechanism& mech, bool locked, const ControlParams& params,
                  std::vector<TraceSample>* trace = nullptr);

  // Re-grasps at the mechanism's current pose with zero wrench.
  void reset();
  const StepResult& tick(const RigidPose& goal);

  const RigidPose& commanded() const { return commanded_; }
  const StepResult& last() const { return last_; }
  double time() const { return time_; }
  // Max over components of |F_obs| - F_m seen so far (negative when never at the limit).
  double worst_excess() const { return worst_excess_; }
  int ticks() const { return ticks_; }

 private:
  JointMechanism& mech_;
  bool locked_;
  const ControlParams& params_;
  std::vector<TraceSample>* trace_;
  RigidPose commanded_;
  StepResult last_;
  double time_ = 0.0;
  double worst_excess_ = -1e300;
  int ticks_ = 0;
};

struct WiggleResult {
  bool movable = false;
  Eigen::Vector3d best_displacement = Eigen::Vector3d::Zero();
  int probes = 0;
};

// Six straight-line probes along +-x, +-y, +-z of the end-effector frame.
// The mechanism is restored to its pre-wiggle coordinate.
WiggleResult wiggle(JointMechanism& mech, bool locked, const ControlParams& params,
                    std::vector<TraceSample>* trace = nullptr);

struct FollowResult {
  bool success = false;
  std::string failure;  // empty on success
  EETrajectory trajectory;
  int iterations = 0;
  double worst_excess = 0.0;  // max_i (|F_i| - F_m_i) over the run
};

// Estimate-and-follow loop: step towards achieved + lookahead * d through the
// wrench gate, re-estimate d from observed displacement, stop at the motion
// limit. `initial_displacement` seeds d (usually the wiggle's best probe).
FollowResult follow_admissible_direction(JointMechanism& mech, bool locked,
                                         const Eigen::Vector3d& initial_displacement,
                                         const ControlParams& params, std::mt19937_64& rng,
                                         std::vector<TraceSample>* trace = nullptr);

// Drives the end-effector through the stored positions (through the wrench
// gate). Fails when the first `move_threshold` of motion does not happen.
FollowResult replay_trajectory(JointMechanism& mech, bool locked, const EETrajectory& path,
                               const ControlParams& params,
                               std::vector<TraceSample>* trace = nullptr);

// 1 prismatic, -1 revolute, 0 unknown. Eigenvalues of the position
// covariance are normalized by their sum before comparing with alpha.
inline constexpr double kDefaultTypeThreshold = 0.02;
int classify_joint_type(const EETrajectory& trajectory, double alpha = kDefaultTypeThreshold);

// Normalized PCA spectrum (descending, sums to 1); zeros when degenerate.
Eigen::Vector3d normalized_spectrum(const std::vector<Eigen::Vector3d>& points);

// CSV with columns t,x,y,z,fx,fy,fz,tx,ty,tz.
void write_trace_csv(std::ostream& out, const std::vector<TraceSample>& trace);

}  // namespace lockbox::sim
